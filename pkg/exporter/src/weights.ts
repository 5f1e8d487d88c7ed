/**
 * Export trained models to the enumeration engine's portable weights
 * schema (relucell-weights v1), with probe inputs for cross-validation.
 *
 * The schema is a single JSON document declaring the widths and listing,
 * in layer order, each row-major weight matrix and bias vector. Export
 * refuses anything that is not a plain dense ReLU MLP: mismatched shape
 * chains (e.g. a transposed matrix) or non-finite parameters.
 */

import * as fs from "fs";
import * as path from "path";

import { Mlp, forward, widthsOf, hiddenLayerCount } from "./mlp.js";
import { makeRng } from "./rng.js";

export const WEIGHTS_FORMAT = "relucell-weights";
export const WEIGHTS_VERSION = 1;
export const PROBES_FORMAT = "relucell-probes";

export interface ExportManifest {
  recipe: { widths: number[]; depth: number; seed: number };
  weightsPath: string;
  probesPath: string;
  datasetPaths?: { train: string; test: string };
  classList?: number[];
}

export interface ProbeFile {
  format: string;
  version: number;
  inputs: number[][];
  outputs: number[][];
}

/** Shape-chain validation; throws with a diagnostic on anything non-MLP. */
export function validateMlpShape(mlp: Mlp): void {
  if (mlp.weights.length < 2) {
    throw new Error("refusing export: need at least one hidden layer and an output layer");
  }
  if (mlp.weights.length !== mlp.biases.length) {
    throw new Error("refusing export: weights/biases layer counts differ");
  }
  for (let l = 0; l < mlp.weights.length; l++) {
    const w = mlp.weights[l];
    const b = mlp.biases[l];
    if (w.data.length !== w.rows * w.cols) {
      throw new Error(`refusing export: layer ${l + 1} matrix storage does not match its shape`);
    }
    if (b.length !== w.rows) {
      throw new Error(
        `refusing export: layer ${l + 1} bias length ${b.length} != row count ${w.rows}`,
      );
    }
    if (l > 0 && w.cols !== mlp.weights[l - 1].rows) {
      throw new Error(
        `refusing export: layer ${l + 1} expects ${w.cols} inputs but the previous ` +
        `layer outputs ${mlp.weights[l - 1].rows} (transposed matrix?)`,
      );
    }
    for (const v of w.data) {
      if (!Number.isFinite(v)) throw new Error(`refusing export: non-finite weight in layer ${l + 1}`);
    }
    for (const v of b) {
      if (!Number.isFinite(v)) throw new Error(`refusing export: non-finite bias in layer ${l + 1}`);
    }
  }
}

function matrixRows(w: { rows: number; cols: number; data: Float64Array }): number[][] {
  const rows: number[][] = [];
  for (let r = 0; r < w.rows; r++) {
    rows.push(Array.from(w.data.subarray(r * w.cols, (r + 1) * w.cols)));
  }
  return rows;
}

/** Write the schema-conformant weights document. */
export function exportWeights(mlp: Mlp, outPath: string): void {
  validateMlpShape(mlp);
  const doc = {
    format: WEIGHTS_FORMAT,
    version: WEIGHTS_VERSION,
    widths: widthsOf(mlp),
    layers: mlp.weights.map((w, l) => ({
      weights: matrixRows(w),
      bias: Array.from(mlp.biases[l]),
    })),
  };
  fs.mkdirSync(path.dirname(path.resolve(outPath)), { recursive: true });
  fs.writeFileSync(outPath, JSON.stringify(doc) + "\n");
}

/**
 * Emit probe inputs with this side's expected outputs, for the consumer
 * to cross-check its forward pass against after parsing the weights.
 */
export function exportProbes(mlp: Mlp, outPath: string, count = 10, seed = 0): ProbeFile {
  validateMlpShape(mlp);
  const rng = makeRng(seed ^ 0x9b0be5);
  const n0 = widthsOf(mlp)[0];
  const inputs: number[][] = [];
  const outputs: number[][] = [];
  for (let i = 0; i < count; i++) {
    const x = Array.from({ length: n0 }, () => rng());
    inputs.push(x);
    outputs.push(Array.from(forward(mlp, x)));
  }
  const doc: ProbeFile = { format: PROBES_FORMAT, version: 1, inputs, outputs };
  fs.writeFileSync(outPath, JSON.stringify(doc) + "\n");
  return doc;
}

/** Bundle weights + probes (+ optional dataset pointers) with a manifest. */
export function exportModel(
  mlp: Mlp,
  seed: number,
  weightsPath: string,
  probesPath: string,
  manifestPath?: string,
): ExportManifest {
  exportWeights(mlp, weightsPath);
  exportProbes(mlp, probesPath, 10, seed);
  const manifest: ExportManifest = {
    recipe: { widths: widthsOf(mlp), depth: hiddenLayerCount(mlp), seed },
    weightsPath,
    probesPath,
  };
  if (manifestPath) {
    fs.writeFileSync(manifestPath, JSON.stringify(manifest, null, 1) + "\n");
  }
  return manifest;
}
