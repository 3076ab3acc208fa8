/** CLI: train a prior model on a dataset manifest, export NPRI priors. */

import { parseArgs } from 'node:util';

import { exportPriors } from './export';
import { EncoderKind } from './model';
import { DEFAULT_CONFIG, TrainConfig, train } from './train';

const USAGE = `usage:
  main.js train --manifest M.json --out DIR [--epochs N] [--lr X] [--batch N]
                [--split X] [--encoder small|resnet50-class] [--seed N] [--no-augment]
  main.js export --model DIR --manifest M.json --out DIR`;

async function runTrain(argv: string[]): Promise<number> {
  const { values } = parseArgs({
    args: argv,
    options: {
      manifest: { type: 'string' },
      out: { type: 'string' },
      epochs: { type: 'string' },
      lr: { type: 'string' },
      batch: { type: 'string' },
      split: { type: 'string' },
      encoder: { type: 'string' },
      seed: { type: 'string' },
      'no-augment': { type: 'boolean' },
    },
  });
  if (!values.manifest || !values.out) {
    console.error(USAGE);
    return 2;
  }
  const encoder = (values.encoder ?? DEFAULT_CONFIG.encoder) as EncoderKind;
  if (encoder !== 'small' && encoder !== 'resnet50-class') {
    console.error(`unknown encoder ${encoder}`);
    return 2;
  }
  const cfg: TrainConfig = {
    epochs: values.epochs ? parseInt(values.epochs, 10) : DEFAULT_CONFIG.epochs,
    learningRate: values.lr ? parseFloat(values.lr) : DEFAULT_CONFIG.learningRate,
    batchSize: values.batch ? parseInt(values.batch, 10) : DEFAULT_CONFIG.batchSize,
    trainFraction: values.split ? parseFloat(values.split) : DEFAULT_CONFIG.trainFraction,
    encoder,
    augment: !values['no-augment'],
    seed: values.seed ? parseInt(values.seed, 10) : DEFAULT_CONFIG.seed,
  };
  if (cfg.epochs < 1 || !(cfg.trainFraction > 0 && cfg.trainFraction < 1)) {
    console.error('epochs must be >= 1 and split in (0, 1)');
    return 2;
  }
  const result = await train(values.manifest, cfg, values.out);
  console.log(
    `best epoch ${result.bestEpoch + 1} val_dice=${result.bestValLoss.toFixed(4)}; ` +
      `model written to ${values.out}`
  );
  return 0;
}

async function runExport(argv: string[]): Promise<number> {
  const { values } = parseArgs({
    args: argv,
    options: {
      model: { type: 'string' },
      manifest: { type: 'string' },
      out: { type: 'string' },
    },
  });
  if (!values.model || !values.manifest || !values.out) {
    console.error(USAGE);
    return 2;
  }
  const results = await exportPriors(values.model, values.manifest, values.out);
  for (const r of results) {
    console.log(r.iou !== undefined ? `${r.file} iou=${r.iou.toFixed(3)}` : r.file);
  }
  return 0;
}

async function main(): Promise<number> {
  const [, , command, ...rest] = process.argv;
  try {
    if (command === 'train') return await runTrain(rest);
    if (command === 'export') return await runExport(rest);
    console.error(USAGE);
    return 2;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

main().then((code) => {
  process.exitCode = code;
});
