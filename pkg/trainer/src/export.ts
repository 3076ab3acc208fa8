/** Inference and prior export: predict, mask occupied cells, renormalize. */

import * as fs from 'fs';
import * as path from 'path';

import * as tf from '@tensorflow/tfjs';

import { KIND_PRIOR, loadGridMap, loadManifest, readNpri, writeNpri } from './formats';
import { CHANNELS, INPUT_SIZE, buildInput, heatmapToMap } from './inputs';
import { initBackend, loadModel } from './train';

const FLOOR = 1e-6; // keeps every free cell reachable and the sum positive

export interface ExportedPrior {
  file: string;
  /** IoU of the thresholded heatmap vs the label, when a label exists. */
  iou?: number;
}

export function predictHeatmap(model: tf.LayersModel, input: Float32Array): Float32Array {
  return tf.tidy(() => {
    const x = tf.tensor4d(input, [1, INPUT_SIZE, INPUT_SIZE, CHANNELS]);
    const pred = model.predict(x) as tf.Tensor;
    return pred.dataSync() as Float32Array;
  });
}

function maskedNormalizedPrior(
  heat: Float64Array,
  occupied: Uint8Array
): Float32Array {
  const weights = new Float64Array(heat.length);
  let sum = 0;
  for (let i = 0; i < heat.length; i++) {
    const w = occupied[i] ? 0 : Math.max(heat[i], FLOOR);
    weights[i] = w;
    sum += w;
  }
  const out = new Float32Array(heat.length);
  for (let i = 0; i < heat.length; i++) {
    out[i] = weights[i] / sum;
  }
  return out;
}

function iouAtHalf(pred224: Float32Array, label: Float32Array): number {
  let inter = 0;
  let union = 0;
  for (let i = 0; i < pred224.length; i++) {
    const p = pred224[i] > 0.5;
    const y = label[i] > 0;
    if (p && y) inter += 1;
    if (p || y) union += 1;
  }
  return union === 0 ? 1 : inter / union;
}

export async function exportPriors(
  modelDir: string,
  manifestFile: string,
  outDir: string
): Promise<ExportedPrior[]> {
  await initBackend();
  fs.mkdirSync(outDir, { recursive: true });
  const model = await loadModel(modelDir);
  const { dir, samples } = loadManifest(manifestFile);
  const results: ExportedPrior[] = [];
  for (const s of samples) {
    const grid = loadGridMap(path.join(dir, s.map));
    const input = buildInput(grid, s.start, s.goal);
    const heat224 = predictHeatmap(model, input);
    const heat = heatmapToMap(heat224, grid.width, grid.height);
    const prior = maskedNormalizedPrior(heat, grid.occupied);
    const name = path.basename(s.map).replace(/\.json$/, '') + '.npri';
    const file = path.join(outDir, name);
    writeNpri(file, { kind: KIND_PRIOR, width: grid.width, height: grid.height, weights: prior });
    const entry: ExportedPrior = { file };
    if (s.label) {
      const labelGrid = readNpri(path.join(dir, s.label));
      const label224 = new Float32Array(INPUT_SIZE * INPUT_SIZE);
      for (let y = 0; y < INPUT_SIZE; y++) {
        const r = Math.min(grid.height - 1, Math.floor((y * grid.height) / INPUT_SIZE));
        for (let x = 0; x < INPUT_SIZE; x++) {
          const c = Math.min(grid.width - 1, Math.floor((x * grid.width) / INPUT_SIZE));
          label224[y * INPUT_SIZE + x] = labelGrid.weights[r * grid.width + c];
        }
      }
      entry.iou = iouAtHalf(heat224, label224);
    }
    results.push(entry);
  }
  return results;
}
