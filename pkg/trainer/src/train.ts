/** Training loop: seeded, Dice-loss-optimized, best-checkpoint saving. */

import * as fs from 'fs';
import * as path from 'path';

import * as tf from '@tensorflow/tfjs';

import { Dataset, Sample, augmentSample, loadSamples, splitDataset } from './data';
import { CHANNELS, INPUT_SIZE } from './inputs';
import { diceLoss, weightedBce } from './loss';
import { EncoderKind, buildModel } from './model';
import { mulberry32, shuffled } from './rng';

export interface TrainConfig {
  epochs: number;
  learningRate: number;
  batchSize: number;
  trainFraction: number;
  encoder: EncoderKind;
  augment: boolean;
  seed: number;
}

export const DEFAULT_CONFIG: TrainConfig = {
  epochs: 50,
  learningRate: 1e-4,
  batchSize: 16,
  trainFraction: 0.9,
  encoder: 'small',
  augment: true,
  seed: 0,
};

export interface EpochLog {
  epoch: number;
  trainLoss: number;
  valLoss: number;
}

export interface TrainResult {
  log: EpochLog[];
  bestEpoch: number;
  bestValLoss: number;
}

export async function initBackend(): Promise<string> {
  try {
    require('@tensorflow/tfjs-backend-wasm');
    await tf.setBackend('wasm');
    await tf.ready();
  } catch {
    await tf.setBackend('cpu');
    await tf.ready();
  }
  return tf.getBackend();
}

function toBatch(samples: Sample[]): { x: tf.Tensor4D; y: tf.Tensor4D } {
  const n = samples.length;
  const x = new Float32Array(n * INPUT_SIZE * INPUT_SIZE * CHANNELS);
  const y = new Float32Array(n * INPUT_SIZE * INPUT_SIZE);
  samples.forEach((s, i) => {
    x.set(s.input, i * INPUT_SIZE * INPUT_SIZE * CHANNELS);
    y.set(s.label, i * INPUT_SIZE * INPUT_SIZE);
  });
  return {
    x: tf.tensor4d(x, [n, INPUT_SIZE, INPUT_SIZE, CHANNELS]),
    y: tf.tensor4d(y, [n, INPUT_SIZE, INPUT_SIZE, 1]),
  };
}

export function evaluateLoss(model: tf.LayersModel, samples: Sample[], batchSize: number): number {
  // Mean per-sample dice over the whole set.
  let sum = 0;
  for (let i = 0; i < samples.length; i += batchSize) {
    const chunk = samples.slice(i, i + batchSize);
    const { x, y } = toBatch(chunk);
    const batchLoss = tf.tidy(
      () => diceLoss(model.predict(x) as tf.Tensor, y).dataSync()[0]
    );
    sum += batchLoss * chunk.length;
    x.dispose();
    y.dispose();
  }
  return sum / samples.length;
}

export async function train(
  manifestFile: string,
  cfg: TrainConfig,
  outDir: string
): Promise<TrainResult> {
  await initBackend();
  fs.mkdirSync(outDir, { recursive: true });
  const samples = loadSamples(manifestFile);
  const splitRng = mulberry32(cfg.seed ^ 0x5eed);
  const dataset: Dataset = splitDataset(samples, cfg.trainFraction, splitRng);
  const model = buildModel(cfg.encoder, cfg.seed);
  const epochRng = mulberry32(cfg.seed + 1);

  const log: EpochLog[] = [];
  let bestValLoss = Infinity;
  let bestEpoch = -1;
  let bestWeights: tf.Tensor[] | null = null;

  const stepsPerEpoch = Math.ceil(dataset.train.length / cfg.batchSize);
  const totalSteps = stepsPerEpoch * cfg.epochs;
  const warmup = Math.min(20, Math.floor(totalSteps / 10));
  // Early training optimizes weighted BCE; dice's all-background attractor
  // is gradient-dead, BCE's is not.
  const bceEpochs = Math.max(1, Math.floor(cfg.epochs / 3));
  let step = 0;
  const optimizer = tf.train.adam(cfg.learningRate);

  for (let epoch = 0; epoch < cfg.epochs; epoch++) {
    const order = shuffled(dataset.train, epochRng);
    let lossSum = 0;
    let batches = 0;
    for (let i = 0; i < order.length; i += cfg.batchSize) {
      let chunk = order.slice(i, i + cfg.batchSize);
      if (cfg.augment) {
        chunk = chunk.map((s) => augmentSample(s, epochRng));
      }
      const { x, y } = toBatch(chunk);
      // Linear warmup then cosine decay to a tenth of the peak rate.
      const frac = step / Math.max(1, totalSteps - 1);
      const scale =
        step < warmup
          ? (step + 1) / warmup
          : 0.1 + 0.45 * (1 + Math.cos(Math.PI * frac));
      (optimizer as unknown as { learningRate: number }).learningRate =
        cfg.learningRate * scale;
      const useBce = epoch < bceEpochs;
      const { value, grads } = tf.variableGrads(() => {
        const out = model.apply(x, { training: true }) as tf.Tensor;
        return useBce ? weightedBce(out, y) : diceLoss(out, y);
      });
      const clipped = tf.tidy(() => {
        const names = Object.keys(grads);
        const norm = tf.sqrt(
          tf.addN(names.map((n) => tf.sum(tf.square(grads[n]))))
        );
        const factor = tf.minimum(1, tf.div(1, tf.maximum(norm, 1e-12)));
        const out: Record<string, tf.Tensor> = {};
        for (const n of names) out[n] = tf.keep(tf.mul(grads[n], factor));
        return out;
      });
      optimizer.applyGradients(clipped as unknown as Parameters<typeof optimizer.applyGradients>[0]);
      lossSum += value.dataSync()[0];
      batches += 1;
      step += 1;
      value.dispose();
      Object.values(grads).forEach((g) => g.dispose());
      Object.values(clipped).forEach((g) => g.dispose());
      x.dispose();
      y.dispose();
    }
    const valLoss = evaluateLoss(model, dataset.val, cfg.batchSize);
    const entry = { epoch, trainLoss: lossSum / batches, valLoss };
    log.push(entry);
    console.log(
      `epoch ${epoch + 1}/${cfg.epochs} train_dice=${entry.trainLoss.toFixed(4)} ` +
        `val_dice=${valLoss.toFixed(4)}`
    );
    if (valLoss < bestValLoss) {
      bestValLoss = valLoss;
      bestEpoch = epoch;
      if (bestWeights) bestWeights.forEach((w) => w.dispose());
      bestWeights = model.getWeights().map((w) => w.clone());
    }
  }

  if (bestWeights) {
    model.setWeights(bestWeights);
    bestWeights.forEach((w) => w.dispose());
  }
  await saveModel(model, outDir);
  fs.writeFileSync(
    path.join(outDir, 'metrics.json'),
    JSON.stringify({ config: cfg, epochs: log, bestEpoch, bestValLoss }, null, 2) + '\n'
  );
  optimizer.dispose();
  return { log, bestEpoch, bestValLoss };
}

export async function saveModel(model: tf.LayersModel, dir: string): Promise<void> {
  fs.mkdirSync(dir, { recursive: true });
  await model.save(
    tf.io.withSaveHandler(async (artifacts) => {
      const weightData = tf.io.CompositeArrayBuffer.join(artifacts.weightData!);
      fs.writeFileSync(
        path.join(dir, 'model.json'),
        JSON.stringify({
          modelTopology: artifacts.modelTopology,
          weightSpecs: artifacts.weightSpecs,
        })
      );
      fs.writeFileSync(path.join(dir, 'weights.bin'), Buffer.from(weightData));
      return { modelArtifactsInfo: { dateSaved: new Date(), modelTopologyType: 'JSON' } };
    })
  );
}

export async function loadModel(dir: string): Promise<tf.LayersModel> {
  const meta = JSON.parse(fs.readFileSync(path.join(dir, 'model.json'), 'utf-8'));
  const weights = fs.readFileSync(path.join(dir, 'weights.bin'));
  return tf.loadLayersModel(
    tf.io.fromMemory({
      modelTopology: meta.modelTopology,
      weightSpecs: meta.weightSpecs,
      weightData: weights.buffer.slice(weights.byteOffset, weights.byteOffset + weights.byteLength),
    })
  );
}
