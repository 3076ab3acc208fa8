import { describe, expect, it } from 'vitest';

import { GridMap } from '../src/formats';
import {
  CHANNELS,
  INPUT_SIZE,
  buildInput,
  buildLabel,
  heatmapToMap,
  inputToMap,
  mapToInput,
} from '../src/inputs';

function emptyGrid(w: number, h: number): GridMap {
  return { width: w, height: h, occupied: new Uint8Array(w * h) };
}

function channel(img: Float32Array, ch: number): Float32Array {
  const out = new Float32Array(INPUT_SIZE * INPUT_SIZE);
  for (let i = 0; i < out.length; i++) out[i] = img[i * CHANNELS + ch];
  return out;
}

describe('buildInput', () => {
  it('empty map: obstacle channel is all zeros, markers present', () => {
    const img = buildInput(emptyGrid(224, 224), [30, 40], [200, 100]);
    const obstacles = channel(img, 0);
    expect(obstacles.every((v) => v === 0)).toBe(true);
    expect(channel(img, 1).some((v) => v === 1)).toBe(true);
    expect(channel(img, 2).some((v) => v === 1)).toBe(true);
  });

  it('start pixel carries max in the red channel', () => {
    const img = buildInput(emptyGrid(224, 224), [30, 40], [200, 100]);
    const [sx, sy] = mapToInput(30, 40, 224, 224);
    expect(img[(sy * INPUT_SIZE + sx) * CHANNELS + 1]).toBe(1);
    expect(img[(sy * INPUT_SIZE + sx) * CHANNELS + 2]).toBe(0);
    const [gx, gy] = mapToInput(200, 100, 224, 224);
    expect(img[(gy * INPUT_SIZE + gx) * CHANNELS + 2]).toBe(1);
  });

  it('obstacles resample to input space', () => {
    const grid = emptyGrid(112, 112);
    grid.occupied[50 * 112 + 60] = 1; // cell (60, 50) covers a 2x2 input block
    const img = buildInput(grid, [1, 1], [100, 100]);
    const obstacles = channel(img, 0);
    expect(obstacles[100 * INPUT_SIZE + 120]).toBe(1);
    expect(obstacles[101 * INPUT_SIZE + 121]).toBe(1);
    expect(obstacles[99 * INPUT_SIZE + 119]).toBe(0);
  });

  it('marker coordinates round-trip within one map cell after rescale', () => {
    for (const [w, h] of [
      [96, 96],
      [160, 160],
      [224, 224],
      [320, 240],
    ]) {
      for (const [c, r] of [
        [0, 0],
        [w - 1, h - 1],
        [Math.floor(w / 3), Math.floor(h / 2)],
        [Math.floor(w / 2), 1],
      ]) {
        const [x, y] = mapToInput(c, r, w, h);
        const [c2, r2] = inputToMap(x, y, w, h);
        expect(Math.abs(c2 - c)).toBeLessThanOrEqual(1);
        expect(Math.abs(r2 - r)).toBeLessThanOrEqual(1);
      }
    }
  });
});

describe('buildLabel / heatmapToMap', () => {
  it('label resamples nearest-neighbor', () => {
    const w = 112;
    const mask = new Float32Array(w * w);
    mask[10 * w + 20] = 1;
    const label = buildLabel(mask, w, w);
    expect(label[20 * INPUT_SIZE + 40]).toBe(1);
    expect(label[21 * INPUT_SIZE + 41]).toBe(1);
    expect(label[19 * INPUT_SIZE + 39]).toBe(0);
  });

  it('heatmap box-mean preserves a constant field', () => {
    const heat = new Float32Array(INPUT_SIZE * INPUT_SIZE).fill(0.25);
    const back = heatmapToMap(heat, 96, 96);
    for (const v of back) expect(v).toBeCloseTo(0.25, 6);
  });

  it('heatmap mass lands in the matching map region', () => {
    const heat = new Float32Array(INPUT_SIZE * INPUT_SIZE);
    // hot 4x4 block around input pixel (56, 112) -> map cell (~24, ~48) at 96
    for (let y = 110; y < 114; y++) for (let x = 54; x < 58; x++) heat[y * INPUT_SIZE + x] = 1;
    const back = heatmapToMap(heat, 96, 96);
    let best = 0;
    let bestIdx = -1;
    for (let i = 0; i < back.length; i++) {
      if (back[i] > best) {
        best = back[i];
        bestIdx = i;
      }
    }
    const r = Math.floor(bestIdx / 96);
    const c = bestIdx % 96;
    expect(Math.abs(c - 24)).toBeLessThanOrEqual(1);
    expect(Math.abs(r - 48)).toBeLessThanOrEqual(1);
  });
});
