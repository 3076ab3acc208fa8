/** File formats shared with the planner: map JSON, NPRI weight grids, manifests. */

import * as fs from 'fs';
import * as path from 'path';

export interface GridMap {
  width: number;
  height: number;
  /** Row-major, 1 = occupied. */
  occupied: Uint8Array;
}

export const NPRI_MAGIC = 'NPRI';
export const KIND_PRIOR = 0x01;
export const KIND_MASK = 0x02;

export function loadGridMap(file: string): GridMap {
  const doc = JSON.parse(fs.readFileSync(file, 'utf-8'));
  if (doc.format !== 'gridmap/1') {
    throw new Error(`${file}: unknown map format ${doc.format}`);
  }
  const { width, height, rows } = doc;
  if (!Number.isInteger(width) || !Number.isInteger(height) || width < 1 || height < 1) {
    throw new Error(`${file}: bad dimensions ${width}x${height}`);
  }
  if (!Array.isArray(rows) || rows.length !== height) {
    throw new Error(`${file}: expected ${height} rows`);
  }
  const occupied = new Uint8Array(width * height);
  for (let r = 0; r < height; r++) {
    const line: string = rows[r];
    if (typeof line !== 'string' || line.length !== width) {
      throw new Error(`${file}: row ${r} must be a string of length ${width}`);
    }
    for (let c = 0; c < width; c++) {
      const ch = line[c];
      if (ch !== '0' && ch !== '1') throw new Error(`${file}: bad cell '${ch}' in row ${r}`);
      occupied[r * width + c] = ch === '1' ? 1 : 0;
    }
  }
  return { width, height, occupied };
}

export function saveGridMap(file: string, grid: GridMap): void {
  const rows: string[] = [];
  for (let r = 0; r < grid.height; r++) {
    let line = '';
    for (let c = 0; c < grid.width; c++) {
      line += grid.occupied[r * grid.width + c] ? '1' : '0';
    }
    rows.push(line);
  }
  const doc = { format: 'gridmap/1', width: grid.width, height: grid.height, rows };
  fs.writeFileSync(file, JSON.stringify(doc) + '\n');
}

export interface WeightGrid {
  kind: number;
  width: number;
  height: number;
  /** Row-major float weights. */
  weights: Float32Array;
}

export function writeNpri(file: string, grid: WeightGrid): void {
  const header = Buffer.alloc(13);
  header.write(NPRI_MAGIC, 0, 'ascii');
  header.writeUInt8(grid.kind, 4);
  header.writeUInt32LE(grid.width, 5);
  header.writeUInt32LE(grid.height, 9);
  const body = Buffer.from(grid.weights.buffer, grid.weights.byteOffset, grid.weights.byteLength);
  fs.writeFileSync(file, Buffer.concat([header, body]));
}

export function readNpri(file: string): WeightGrid {
  const blob = fs.readFileSync(file);
  if (blob.length < 13) throw new Error(`${file}: truncated header`);
  if (blob.toString('ascii', 0, 4) !== NPRI_MAGIC) {
    throw new Error(`${file}: bad magic`);
  }
  const kind = blob.readUInt8(4);
  const width = blob.readUInt32LE(5);
  const height = blob.readUInt32LE(9);
  const expected = 13 + 4 * width * height;
  if (blob.length !== expected) {
    throw new Error(`${file}: expected ${expected} bytes for ${width}x${height}, got ${blob.length}`);
  }
  const weights = new Float32Array(width * height);
  for (let i = 0; i < weights.length; i++) {
    weights[i] = blob.readFloatLE(13 + 4 * i);
  }
  return { kind, width, height, weights };
}

export interface ManifestSample {
  map: string;
  label?: string;
  start: [number, number]; // [col, row]
  goal: [number, number];
  density?: string;
}

export interface Manifest {
  format: string;
  samples: ManifestSample[];
}

export function loadManifest(file: string): { dir: string; samples: ManifestSample[] } {
  const doc: Manifest = JSON.parse(fs.readFileSync(file, 'utf-8'));
  if (doc.format !== 'dataset/1') {
    throw new Error(`${file}: unknown manifest format ${doc.format}`);
  }
  return { dir: path.dirname(file), samples: doc.samples };
}
