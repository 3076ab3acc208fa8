import * as fs from 'fs';
import * as os from 'os';
import * as path from 'path';

import { afterAll, describe, expect, it } from 'vitest';

import {
  GridMap,
  KIND_MASK,
  KIND_PRIOR,
  loadGridMap,
  loadManifest,
  readNpri,
  saveGridMap,
  writeNpri,
} from '../src/formats';

const tmp = fs.mkdtempSync(path.join(os.tmpdir(), 'trainer-formats-'));
afterAll(() => fs.rmSync(tmp, { recursive: true, force: true }));

function checkerboard(w: number, h: number): GridMap {
  const occupied = new Uint8Array(w * h);
  for (let i = 0; i < occupied.length; i++) occupied[i] = i % 2;
  return { width: w, height: h, occupied };
}

describe('gridmap json', () => {
  it('round-trips', () => {
    const grid = checkerboard(9, 5);
    const f = path.join(tmp, 'g.json');
    saveGridMap(f, grid);
    const back = loadGridMap(f);
    expect(back.width).toBe(9);
    expect(back.height).toBe(5);
    expect(Array.from(back.occupied)).toEqual(Array.from(grid.occupied));
  });

  it('rejects unknown format', () => {
    const f = path.join(tmp, 'bad.json');
    fs.writeFileSync(f, JSON.stringify({ format: 'gridmap/9', width: 1, height: 1, rows: ['0'] }));
    expect(() => loadGridMap(f)).toThrow(/unknown map format/);
  });

  it('rejects malformed rows', () => {
    const f = path.join(tmp, 'bad2.json');
    fs.writeFileSync(f, JSON.stringify({ format: 'gridmap/1', width: 2, height: 1, rows: ['2x'] }));
    expect(() => loadGridMap(f)).toThrow(/bad cell/);
  });
});

describe('npri', () => {
  it('round-trips priors and masks', () => {
    const w = new Float32Array([0.25, 0.25, 0.25, 0.25]);
    const f = path.join(tmp, 'p.npri');
    writeNpri(f, { kind: KIND_PRIOR, width: 2, height: 2, weights: w });
    const back = readNpri(f);
    expect(back.kind).toBe(KIND_PRIOR);
    expect(back.width).toBe(2);
    expect(Array.from(back.weights)).toEqual(Array.from(w));

    const m = new Float32Array([1, 0, 0, 1]);
    const f2 = path.join(tmp, 'm.npri');
    writeNpri(f2, { kind: KIND_MASK, width: 2, height: 2, weights: m });
    expect(readNpri(f2).kind).toBe(KIND_MASK);
  });

  it('rejects truncation and bad magic', () => {
    const f = path.join(tmp, 'trunc.npri');
    writeNpri(f, { kind: KIND_PRIOR, width: 2, height: 2, weights: new Float32Array(4) });
    const blob = fs.readFileSync(f);
    fs.writeFileSync(f, blob.subarray(0, blob.length - 3));
    expect(() => readNpri(f)).toThrow(/expected/);
    const f2 = path.join(tmp, 'magic.npri');
    fs.writeFileSync(f2, Buffer.concat([Buffer.from('XXXX'), blob.subarray(4)]));
    expect(() => readNpri(f2)).toThrow(/bad magic/);
  });
});

describe('manifest', () => {
  it('loads samples relative to its directory', () => {
    const f = path.join(tmp, 'manifest.json');
    fs.writeFileSync(
      f,
      JSON.stringify({
        format: 'dataset/1',
        samples: [{ map: 'maps/0.json', label: 'labels/0.npri', start: [1, 2], goal: [3, 4] }],
      })
    );
    const { dir, samples } = loadManifest(f);
    expect(dir).toBe(tmp);
    expect(samples[0].start).toEqual([1, 2]);
  });
});
