/**
 * Demo entry point: train a small classifier on the synthetic source,
 * export weights + probes + dataset splits for the enumeration engine.
 *
 *   node dist/cli.js [outDir]
 */

import * as path from "path";

import { DEFAULT_CLASSES, makeDataset, syntheticSource } from "./dataset.js";
import { accuracy } from "./mlp.js";
import { trainClassifier } from "./train.js";
import { exportModel } from "./weights.js";

const outDir = process.argv[2] ?? "export-out";
const seed = 2025;
const side = 4; // 4x4 synthetic images -> n0 = 16
const widths = [side * side, 11, 11, 15];

const source = syntheticSource(DEFAULT_CLASSES, 240, side, seed);
const split = makeDataset(
  source,
  { classes: DEFAULT_CLASSES, trainPerClass: 200, testPerClass: 40, side, seed },
  path.join(outDir, "train.npz"),
  path.join(outDir, "test.npz"),
);

const trainX = source.images.slice();
const trainY = Array.from(source.labels);
const { mlp, losses } = trainClassifier(trainX, trainY, { widths, seed, epochs: 12 });
console.log(`trained ${widths.join("x")}: loss ${losses[0].toFixed(3)} -> ${losses.at(-1)!.toFixed(3)}`);
console.log(`train accuracy ${(accuracy(mlp, trainX, trainY) * 100).toFixed(1)}%`);

const manifest = exportModel(
  mlp,
  seed,
  path.join(outDir, "model.json"),
  path.join(outDir, "probes.json"),
  path.join(outDir, "manifest.json"),
);
console.log(`exported ${manifest.weightsPath} (+probes, +manifest)`);
console.log(`dataset splits: ${split.trainPath} (${split.trainHash.slice(0, 12)}), ` +
  `${split.testPath} (${split.testHash.slice(0, 12)})`);
