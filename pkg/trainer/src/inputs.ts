/** Model input encoding: a 3-channel 224x224 image per planning problem.
 *
 * Channel 0 carries the obstacle raster, channel 1 ("red") the start marker,
 * channel 2 ("green") the goal marker. Maps of any size are resampled to
 * 224 with nearest-neighbor; markers are drawn as small disks in input space.
 */

import { GridMap } from './formats';

export const INPUT_SIZE = 224;
export const CHANNELS = 3;
export const MARKER_RADIUS = 5;

export function mapToInput(c: number, r: number, width: number, height: number): [number, number] {
  const x = Math.min(INPUT_SIZE - 1, Math.floor(((c + 0.5) * INPUT_SIZE) / width));
  const y = Math.min(INPUT_SIZE - 1, Math.floor(((r + 0.5) * INPUT_SIZE) / height));
  return [x, y];
}

export function inputToMap(x: number, y: number, width: number, height: number): [number, number] {
  const c = Math.min(width - 1, Math.floor(((x + 0.5) * width) / INPUT_SIZE));
  const r = Math.min(height - 1, Math.floor(((y + 0.5) * height) / INPUT_SIZE));
  return [c, r];
}

function drawDisk(img: Float32Array, cx: number, cy: number, channel: number): void {
  for (let dy = -MARKER_RADIUS; dy <= MARKER_RADIUS; dy++) {
    for (let dx = -MARKER_RADIUS; dx <= MARKER_RADIUS; dx++) {
      if (dx * dx + dy * dy > MARKER_RADIUS * MARKER_RADIUS) continue;
      const x = cx + dx;
      const y = cy + dy;
      if (x < 0 || y < 0 || x >= INPUT_SIZE || y >= INPUT_SIZE) continue;
      img[(y * INPUT_SIZE + x) * CHANNELS + channel] = 1.0;
    }
  }
}

/** HWC float image of shape [224, 224, 3]. */
export function buildInput(grid: GridMap, start: [number, number], goal: [number, number]): Float32Array {
  const img = new Float32Array(INPUT_SIZE * INPUT_SIZE * CHANNELS);
  for (let y = 0; y < INPUT_SIZE; y++) {
    const r = Math.min(grid.height - 1, Math.floor((y * grid.height) / INPUT_SIZE));
    for (let x = 0; x < INPUT_SIZE; x++) {
      const c = Math.min(grid.width - 1, Math.floor((x * grid.width) / INPUT_SIZE));
      img[(y * INPUT_SIZE + x) * CHANNELS] = grid.occupied[r * grid.width + c];
    }
  }
  const [sx, sy] = mapToInput(start[0], start[1], grid.width, grid.height);
  const [gx, gy] = mapToInput(goal[0], goal[1], grid.width, grid.height);
  drawDisk(img, sx, sy, 1);
  drawDisk(img, gx, gy, 2);
  return img;
}

/** Nearest-neighbor resample of a map-resolution 0/1 mask to [224, 224, 1]. */
export function buildLabel(mask: Float32Array, width: number, height: number): Float32Array {
  const out = new Float32Array(INPUT_SIZE * INPUT_SIZE);
  for (let y = 0; y < INPUT_SIZE; y++) {
    const r = Math.min(height - 1, Math.floor((y * height) / INPUT_SIZE));
    for (let x = 0; x < INPUT_SIZE; x++) {
      const c = Math.min(width - 1, Math.floor((x * width) / INPUT_SIZE));
      out[y * INPUT_SIZE + x] = mask[r * width + c] > 0 ? 1 : 0;
    }
  }
  return out;
}

/** Box-mean resample of a 224x224 heatmap back to map resolution. */
export function heatmapToMap(pred: Float32Array, width: number, height: number): Float64Array {
  const out = new Float64Array(width * height);
  for (let r = 0; r < height; r++) {
    const y0 = Math.floor((r * INPUT_SIZE) / height);
    const y1 = Math.max(y0 + 1, Math.floor(((r + 1) * INPUT_SIZE) / height));
    for (let c = 0; c < width; c++) {
      const x0 = Math.floor((c * INPUT_SIZE) / width);
      const x1 = Math.max(x0 + 1, Math.floor(((c + 1) * INPUT_SIZE) / width));
      let sum = 0;
      for (let y = y0; y < y1; y++) {
        for (let x = x0; x < x1; x++) {
          sum += pred[y * INPUT_SIZE + x];
        }
      }
      out[r * width + c] = sum / ((y1 - y0) * (x1 - x0));
    }
  }
  return out;
}
