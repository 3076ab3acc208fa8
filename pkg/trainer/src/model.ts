/** Encoder-decoder heatmap models with U-Net skip connections.
 *
 * "small" pools the 224 input down to 56 first and runs a light 4-level
 * encoder-decoder: cheap enough to train on a CPU in seconds. The
 * "resnet50-class" variant swaps the encoder for residual bottleneck stages
 * of the same structural family; same input/output contract, far heavier.
 *
 * Convolutions run through conv3d with a unit depth axis: the wasm backend
 * ships gradient kernels for Conv3D but not Conv2DBackpropFilter, and wasm
 * is the only backend here fast enough to train on.
 */

import * as tf from '@tensorflow/tfjs';

import { CHANNELS, INPUT_SIZE } from './inputs';

export type EncoderKind = 'small' | 'resnet50-class';

type Activation = 'relu' | 'sigmoid' | 'linear';

interface PlanarConvConfig {
  filters: number;
  kernelSize: number;
  activation?: Activation;
  strides?: number;
  seed?: number;
  /** Constant bias init; a negative head bias matches sparse targets. */
  biasInit?: number;
  name?: string;
}

export class PlanarConv extends tf.layers.Layer {
  static className = 'PlanarConv';

  private readonly filters: number;
  private readonly kernelSize: number;
  private readonly activation: Activation;
  private readonly strides: number;
  private readonly seed: number;
  private readonly biasInit: number;
  private kernel!: ReturnType<tf.layers.Layer['addWeight']>;
  private bias!: ReturnType<tf.layers.Layer['addWeight']>;

  constructor(config: PlanarConvConfig) {
    super({ name: config.name });
    this.filters = config.filters;
    this.kernelSize = config.kernelSize;
    this.activation = config.activation ?? 'linear';
    this.strides = config.strides ?? 1;
    this.seed = config.seed ?? 0;
    this.biasInit = config.biasInit ?? 0;
  }

  override build(inputShape: tf.Shape | tf.Shape[]): void {
    const shape = (Array.isArray(inputShape[0]) ? inputShape[0] : inputShape) as number[];
    const inChannels = shape[3];
    this.kernel = this.addWeight(
      'kernel',
      [this.kernelSize, this.kernelSize, inChannels, this.filters],
      'float32',
      tf.initializers.heNormal({ seed: this.seed })
    );
    this.bias = this.addWeight(
      'bias',
      [this.filters],
      'float32',
      tf.initializers.constant({ value: this.biasInit })
    );
    this.built = true;
  }

  override computeOutputShape(inputShape: tf.Shape | tf.Shape[]): tf.Shape {
    const shape = (Array.isArray(inputShape[0]) ? inputShape[0] : inputShape) as number[];
    const oh = Math.ceil(shape[1] / this.strides);
    const ow = Math.ceil(shape[2] / this.strides);
    return [shape[0], oh, ow, this.filters];
  }

  override call(inputs: tf.Tensor | tf.Tensor[]): tf.Tensor {
    return tf.tidy(() => {
      const x = (Array.isArray(inputs) ? inputs[0] : inputs) as tf.Tensor4D;
      const [b, h, w, ci] = x.shape;
      const x5 = tf.reshape(x, [b, 1, h, w, ci]) as tf.Tensor5D;
      const k5 = tf.reshape(this.kernel.read(), [
        1,
        this.kernelSize,
        this.kernelSize,
        ci,
        this.filters,
      ]) as tf.Tensor5D;
      const y5 = tf.conv3d(x5, k5, [1, this.strides, this.strides], 'same');
      const [, , oh, ow] = y5.shape;
      let y: tf.Tensor = tf.reshape(y5, [b, oh, ow, this.filters]);
      y = tf.add(y, this.bias.read());
      if (this.activation === 'relu') y = tf.relu(y);
      else if (this.activation === 'sigmoid') y = tf.sigmoid(y);
      return y;
    });
  }

  override getConfig(): tf.serialization.ConfigDict {
    const config = super.getConfig();
    return {
      ...config,
      filters: this.filters,
      kernelSize: this.kernelSize,
      activation: this.activation,
      strides: this.strides,
      seed: this.seed,
      biasInit: this.biasInit,
    };
  }
}

tf.serialization.registerClass(PlanarConv);

/**
 * Appends two channels holding normalized x and y coordinates in [-1, 1].
 * Free space is all-zero in every input channel, so without these the net
 * has no way to give empty pixels a positional identity relative to the
 * start/goal markers.
 */
export class CoordChannels extends tf.layers.Layer {
  static className = 'CoordChannels';

  override computeOutputShape(inputShape: tf.Shape | tf.Shape[]): tf.Shape {
    const shape = (Array.isArray(inputShape[0]) ? inputShape[0] : inputShape) as number[];
    return [shape[0], shape[1], shape[2], shape[3] + 2];
  }

  override call(inputs: tf.Tensor | tf.Tensor[]): tf.Tensor {
    return tf.tidy(() => {
      const x = (Array.isArray(inputs) ? inputs[0] : inputs) as tf.Tensor4D;
      const [b, h, w] = x.shape;
      const xs = tf.tile(
        tf.reshape(tf.linspace(-1, 1, w), [1, 1, w, 1]),
        [b, h, 1, 1]
      );
      const ys = tf.tile(
        tf.reshape(tf.linspace(-1, 1, h), [1, h, 1, 1]),
        [b, 1, w, 1]
      );
      return tf.concat([x, xs, ys], 3);
    });
  }

  override getConfig(): tf.serialization.ConfigDict {
    return super.getConfig();
  }
}

tf.serialization.registerClass(CoordChannels);

/**
 * Appends four constant channels holding the soft-argmax centroids of the
 * start (red) and goal (green) marker channels, normalized to [-1, 1].
 * Combined with CoordChannels this makes "on the corridor between the two
 * markers" a locally computable function at every position.
 *
 * Takes [features, network input]; broadcasts over the feature resolution.
 */
export class MarkerBroadcast extends tf.layers.Layer {
  static className = 'MarkerBroadcast';

  override computeOutputShape(inputShape: tf.Shape | tf.Shape[]): tf.Shape {
    const shapes = inputShape as tf.Shape[];
    const feat = shapes[0] as number[];
    return [feat[0], feat[1], feat[2], feat[3] + 4];
  }

  override call(inputs: tf.Tensor | tf.Tensor[]): tf.Tensor {
    return tf.tidy(() => {
      const [feat, img] = inputs as [tf.Tensor4D, tf.Tensor4D];
      const [b, fh, fw] = feat.shape;
      const [, ih, iw] = img.shape;
      const xs = tf.reshape(tf.linspace(-1, 1, iw), [1, 1, iw, 1]);
      const ys = tf.reshape(tf.linspace(-1, 1, ih), [1, ih, 1, 1]);
      const coords: tf.Tensor[] = [];
      for (const ch of [1, 2]) {
        const mass = tf.slice(img, [0, 0, 0, ch], [b, ih, iw, 1]);
        const total = tf.maximum(tf.sum(mass, [1, 2, 3]), 1e-6); // [b]
        const cx = tf.div(tf.sum(tf.mul(mass, xs), [1, 2, 3]), total);
        const cy = tf.div(tf.sum(tf.mul(mass, ys), [1, 2, 3]), total);
        coords.push(cx, cy);
      }
      const packed = tf.reshape(tf.stack(coords, 1), [b, 1, 1, 4]);
      const tiled = tf.tile(packed, [1, fh, fw, 1]);
      return tf.concat([feat, tiled], 3);
    });
  }

  override getConfig(): tf.serialization.ConfigDict {
    return super.getConfig();
  }
}

tf.serialization.registerClass(MarkerBroadcast);

class SeedStream {
  private next: number;

  constructor(seed: number) {
    this.next = (seed >>> 0) + 1;
  }

  take(): number {
    return this.next++;
  }
}

function conv(
  x: tf.SymbolicTensor,
  filters: number,
  seeds: SeedStream,
  opts: { kernelSize?: number; activation?: Activation; strides?: number; biasInit?: number } = {}
): tf.SymbolicTensor {
  const layer = new PlanarConv({
    filters,
    kernelSize: opts.kernelSize ?? 3,
    activation: opts.activation ?? 'relu',
    strides: opts.strides ?? 1,
    seed: seeds.take(),
    biasInit: opts.biasInit,
  });
  return layer.apply(x) as tf.SymbolicTensor;
}

function buildSmall(seeds: SeedStream): tf.LayersModel {
  const input = tf.input({ shape: [INPUT_SIZE, INPUT_SIZE, CHANNELS] });
  // 224 -> 56 stem keeps the whole net affordable on CPU.
  const pooled = tf.layers.averagePooling2d({ poolSize: 4, strides: 4 }).apply(input) as tf.SymbolicTensor;
  const stem = new CoordChannels({}).apply(pooled) as tf.SymbolicTensor;

  const c1 = conv(conv(stem, 8, seeds), 8, seeds); // 56
  const p1 = tf.layers.maxPooling2d({ poolSize: 2 }).apply(c1) as tf.SymbolicTensor; // 28
  const c2 = conv(conv(p1, 16, seeds), 16, seeds);
  const p2 = tf.layers.maxPooling2d({ poolSize: 2 }).apply(c2) as tf.SymbolicTensor; // 14
  const c3 = conv(conv(p2, 32, seeds), 32, seeds);
  const p3 = tf.layers.maxPooling2d({ poolSize: 2 }).apply(c3) as tf.SymbolicTensor; // 7
  const c4 = conv(conv(p3, 64, seeds), 64, seeds);

  // Local coordinates again at every decoder scale: band membership is a
  // function of position relative to the marker encodings carried in the
  // features.
  const up3 = tf.layers.upSampling2d({ size: [2, 2] }).apply(c4) as tf.SymbolicTensor; // 14
  const m3 = new CoordChannels({}).apply(
    tf.layers.concatenate().apply([up3, c3]) as tf.SymbolicTensor
  ) as tf.SymbolicTensor;
  const d3 = conv(m3, 32, seeds);
  const up2 = tf.layers.upSampling2d({ size: [2, 2] }).apply(d3) as tf.SymbolicTensor; // 28
  const m2 = new CoordChannels({}).apply(
    tf.layers.concatenate().apply([up2, c2]) as tf.SymbolicTensor
  ) as tf.SymbolicTensor;
  const d2 = conv(m2, 16, seeds);
  const up1 = tf.layers.upSampling2d({ size: [2, 2] }).apply(d2) as tf.SymbolicTensor; // 56
  const m1 = new CoordChannels({}).apply(
    tf.layers.concatenate().apply([up1, c1]) as tf.SymbolicTensor
  ) as tf.SymbolicTensor;
  const d1 = conv(m1, 8, seeds);

  const head = conv(d1, 1, seeds, { kernelSize: 1, activation: 'sigmoid', biasInit: -2.5 });
  const out = tf.layers.upSampling2d({ size: [4, 4] }).apply(head) as tf.SymbolicTensor; // 224

  return tf.model({ inputs: input, outputs: out });
}

function bottleneck(x: tf.SymbolicTensor, filters: number, seeds: SeedStream, stride = 1): tf.SymbolicTensor {
  let y = conv(x, filters, seeds, { kernelSize: 1, strides: stride });
  y = conv(y, filters, seeds);
  y = conv(y, filters * 4, seeds, { kernelSize: 1, activation: 'linear' });
  let shortcut = x;
  const inChannels = x.shape[x.shape.length - 1] as number;
  if (stride !== 1 || inChannels !== filters * 4) {
    shortcut = conv(x, filters * 4, seeds, { kernelSize: 1, strides: stride, activation: 'linear' });
  }
  const added = tf.layers.add().apply([y, shortcut]) as tf.SymbolicTensor;
  return tf.layers.reLU().apply(added) as tf.SymbolicTensor;
}

function buildResnetClass(seeds: SeedStream): tf.LayersModel {
  const input = tf.input({ shape: [INPUT_SIZE, INPUT_SIZE, CHANNELS] });
  const withCoords = new CoordChannels({}).apply(input) as tf.SymbolicTensor;
  let x = conv(withCoords, 32, seeds, { kernelSize: 7, strides: 2 }); // 112
  x = tf.layers.maxPooling2d({ poolSize: 2 }).apply(x) as tf.SymbolicTensor; // 56

  const stages: tf.SymbolicTensor[] = [];
  const widths = [16, 32, 64, 128];
  const depths = [3, 4, 6, 3];
  for (let s = 0; s < widths.length; s++) {
    x = bottleneck(x, widths[s], seeds, s === 0 ? 1 : 2);
    for (let b = 1; b < depths[s]; b++) {
      x = bottleneck(x, widths[s], seeds);
    }
    stages.push(x); // 56, 28, 14, 7
  }

  let d = stages[3];
  for (let s = 2; s >= 0; s--) {
    const up = tf.layers.upSampling2d({ size: [2, 2] }).apply(d) as tf.SymbolicTensor;
    const merged = tf.layers.concatenate().apply([up, stages[s]]) as tf.SymbolicTensor;
    d = conv(merged, widths[s] * 2, seeds);
  }

  const head = conv(d, 1, seeds, { kernelSize: 1, activation: 'sigmoid', biasInit: -2.5 }); // 56
  const out = tf.layers.upSampling2d({ size: [4, 4] }).apply(head) as tf.SymbolicTensor;
  return tf.model({ inputs: input, outputs: out });
}

export function buildModel(encoder: EncoderKind, seed: number): tf.LayersModel {
  const seeds = new SeedStream(seed);
  if (encoder === 'small') return buildSmall(seeds);
  if (encoder === 'resnet50-class') return buildResnetClass(seeds);
  throw new Error(`unknown encoder ${encoder}`);
}
