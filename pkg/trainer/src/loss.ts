/** Soft Dice loss between a predicted heatmap and a binary target mask. */

import * as tf from '@tensorflow/tfjs';

export const DICE_EPS = 1e-6;

/**
 * 1 - (2*sum(P*Y) + eps) / (sum(P) + sum(Y) + eps). Predictions must lie in
 * [0, 1]; identical binary masks give ~0, disjoint masks ~1.
 *
 * Rank-4 inputs ([batch, h, w, c]) are scored per sample and averaged:
 * batch-union dice lets one disjoint pair drag every other prediction in
 * the batch toward zero, which saturates the sigmoid head.
 */
export function diceLoss(pred: tf.Tensor, target: tf.Tensor, eps: number = DICE_EPS): tf.Scalar {
  if (pred.shape.join(',') !== target.shape.join(',')) {
    throw new Error(`shape mismatch: ${pred.shape} vs ${target.shape}`);
  }
  return tf.tidy(() => {
    const axes = pred.rank === 4 ? [1, 2, 3] : undefined;
    const inter = tf.sum(tf.mul(pred, target), axes);
    const total = tf.add(tf.sum(pred, axes), tf.sum(target, axes));
    const dice = tf.div(tf.add(tf.mul(inter, 2), eps), tf.add(total, eps));
    return tf.mean(tf.sub(1, dice)) as tf.Scalar;
  });
}

/**
 * Class-weighted binary cross-entropy. Used only as a short warmup phase:
 * dice has a gradient-dead attractor at the all-background prediction, and
 * BCE does not, so a few BCE epochs move the model into dice's basin.
 */
export function weightedBce(pred: tf.Tensor, target: tf.Tensor, posWeight = 10): tf.Scalar {
  if (pred.shape.join(',') !== target.shape.join(',')) {
    throw new Error(`shape mismatch: ${pred.shape} vs ${target.shape}`);
  }
  return tf.tidy(() => {
    const p = tf.clipByValue(pred, 1e-6, 1 - 1e-6);
    const pos = tf.mul(tf.mul(target, tf.log(p)), posWeight);
    const neg = tf.mul(tf.sub(1, target), tf.log(tf.sub(1, p)));
    return tf.neg(tf.mean(tf.add(pos, neg))) as tf.Scalar;
  });
}
