import * as tf from '@tensorflow/tfjs';
import { beforeAll, describe, expect, it } from 'vitest';

import { diceLoss } from '../src/loss';
import { mulberry32 } from '../src/rng';
import { initBackend } from '../src/train';

beforeAll(async () => {
  await initBackend();
});

function randomMask(rng: () => number, n: number, p: number): Float32Array {
  const m = new Float32Array(n);
  for (let i = 0; i < n; i++) m[i] = rng() < p ? 1 : 0;
  return m;
}

describe('diceLoss', () => {
  it('is ~0 for identical binary masks and ~1 for disjoint masks (100 random masks)', () => {
    const rng = mulberry32(42);
    let worstSelf = 0;
    let worstDisjoint = 1;
    for (let trial = 0; trial < 100; trial++) {
      const n = 24 * 24;
      const y = randomMask(rng, n, 0.05 + 0.4 * rng());
      if (!y.includes(1)) {
        y[0] = 1;
      }
      const complement = new Float32Array(n);
      for (let i = 0; i < n; i++) complement[i] = 1 - y[i];
      const ty = tf.tensor(y);
      const tc = tf.tensor(complement);
      worstSelf = Math.max(worstSelf, diceLoss(ty, ty).dataSync()[0]);
      worstDisjoint = Math.min(worstDisjoint, diceLoss(tc, ty).dataSync()[0]);
      ty.dispose();
      tc.dispose();
    }
    const ok = worstSelf <= 1e-5 && worstDisjoint >= 1 - 1e-5;
    console.log(
      `ACCEPTANCE ${ok ? 'PASS' : 'FAIL'}: Dice properties ` +
        `(max self-loss ${worstSelf.toExponential(2)}, min disjoint ${worstDisjoint.toFixed(6)})`
    );
    expect(worstSelf).toBeLessThanOrEqual(1e-5);
    expect(worstDisjoint).toBeGreaterThanOrEqual(1 - 1e-5);
  });

  it('gives 0.5 for half-overlapping two-cell masks', () => {
    const p = tf.tensor([1, 1, 0, 0]);
    const y = tf.tensor([0, 1, 1, 0]);
    expect(diceLoss(p, y).dataSync()[0]).toBeCloseTo(0.5, 5);
  });

  it('stays within [0, 1] for soft predictions', () => {
    const rng = mulberry32(7);
    for (let trial = 0; trial < 50; trial++) {
      const n = 100;
      const soft = new Float32Array(n);
      for (let i = 0; i < n; i++) soft[i] = rng();
      const y = randomMask(rng, n, 0.3);
      const tp = tf.tensor(soft);
      const ty = tf.tensor(y);
      const v = diceLoss(tp, ty).dataSync()[0];
      expect(v).toBeGreaterThanOrEqual(0);
      expect(v).toBeLessThanOrEqual(1);
      tp.dispose();
      ty.dispose();
    }
  });

  it('rejects shape mismatches', () => {
    const p = tf.zeros([4, 4]);
    const y = tf.zeros([4, 5]);
    expect(() => diceLoss(p, y)).toThrow(/shape mismatch/);
  });
});
