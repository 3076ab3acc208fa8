/** Dataset loading, train/val split, and geometric augmentation. */

import * as path from 'path';

import { KIND_MASK, loadGridMap, loadManifest, readNpri } from './formats';
import { buildInput, buildLabel, CHANNELS, INPUT_SIZE } from './inputs';
import { Rng, randInt, shuffled } from './rng';

export interface Sample {
  /** [224, 224, 3] HWC */
  input: Float32Array;
  /** [224, 224] */
  label: Float32Array;
}

export interface Dataset {
  train: Sample[];
  val: Sample[];
}

export function loadSamples(manifestFile: string): Sample[] {
  const { dir, samples } = loadManifest(manifestFile);
  return samples.map((s) => {
    if (!s.label) throw new Error(`manifest entry for ${s.map} is missing a label`);
    const grid = loadGridMap(path.join(dir, s.map));
    const labelGrid = readNpri(path.join(dir, s.label));
    if (labelGrid.kind !== KIND_MASK) {
      throw new Error(`${s.label}: expected a mask (kind 0x02)`);
    }
    if (labelGrid.width !== grid.width || labelGrid.height !== grid.height) {
      throw new Error(`${s.label}: dimensions do not match ${s.map}`);
    }
    return {
      input: buildInput(grid, s.start, s.goal),
      label: buildLabel(labelGrid.weights, grid.width, grid.height),
    };
  });
}

export function splitDataset(samples: Sample[], trainFraction: number, rng: Rng): Dataset {
  const order = shuffled(samples, rng);
  const nTrain = Math.max(1, Math.min(order.length - 1, Math.round(order.length * trainFraction)));
  return { train: order.slice(0, nTrain), val: order.slice(nTrain) };
}

function rot90Index(x: number, y: number, k: number, n: number): [number, number] {
  switch (k & 3) {
    case 0:
      return [x, y];
    case 1:
      return [y, n - 1 - x];
    case 2:
      return [n - 1 - x, n - 1 - y];
    default:
      return [n - 1 - y, x];
  }
}

/**
 * Joint geometric augmentation: a random quarter-turn plus optional mirror,
 * applied identically to the input image (obstacles and both markers) and
 * the label, so start/goal reposition consistently with their path band.
 */
export function augmentSample(sample: Sample, rng: Rng): Sample {
  const k = randInt(rng, 4);
  const flip = rng() < 0.5;
  if (k === 0 && !flip) return sample;
  const n = INPUT_SIZE;
  const input = new Float32Array(sample.input.length);
  const label = new Float32Array(sample.label.length);
  for (let y = 0; y < n; y++) {
    for (let x = 0; x < n; x++) {
      let sx = flip ? n - 1 - x : x;
      const [ox, oy] = rot90Index(sx, y, k, n);
      const src = oy * n + ox;
      const dst = y * n + x;
      label[dst] = sample.label[src];
      for (let ch = 0; ch < CHANNELS; ch++) {
        input[dst * CHANNELS + ch] = sample.input[src * CHANNELS + ch];
      }
    }
  }
  return { input, label };
}
