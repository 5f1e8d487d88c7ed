/**
 * Minimal dense ReLU MLP: enough to train small classifiers and evaluate
 * them exactly the way the enumeration side will (float64 end to end).
 */

import { makeGaussian, makeRng } from "./rng.js";

/** Row-major matrix: data[r * cols + c]. */
export interface Matrix {
  rows: number;
  cols: number;
  data: Float64Array;
}

export interface Mlp {
  /** weights[l] maps width[l] -> width[l+1]; last layer is linear. */
  weights: Matrix[];
  biases: Float64Array[];
}

export function zerosMatrix(rows: number, cols: number): Matrix {
  return { rows, cols, data: new Float64Array(rows * cols) };
}

/** [n0, n1, ..., nL, m] including input and output widths. */
export function widthsOf(mlp: Mlp): number[] {
  return [mlp.weights[0].cols, ...mlp.weights.map((w) => w.rows)];
}

export function hiddenLayerCount(mlp: Mlp): number {
  return mlp.weights.length - 1;
}

/**
 * Gaussian init with variance 2/fan-in for weights and a tiny bias spread
 * (1e-3 std, i.e. 1e-6 variance).
 */
export function initMlp(widths: number[], seed: number, rng?: () => number): Mlp {
  if (widths.length < 3) {
    throw new Error("widths must be [n0, hidden..., m] with at least one hidden layer");
  }
  const gauss = makeGaussian(rng ?? makeRng(seed));
  const weights: Matrix[] = [];
  const biases: Float64Array[] = [];
  for (let l = 1; l < widths.length; l++) {
    const fanIn = widths[l - 1];
    const w = zerosMatrix(widths[l], fanIn);
    const scale = Math.sqrt(2.0 / fanIn);
    for (let i = 0; i < w.data.length; i++) w.data[i] = scale * gauss();
    const b = new Float64Array(widths[l]);
    for (let i = 0; i < b.length; i++) b[i] = 1e-3 * gauss();
    weights.push(w);
    biases.push(b);
  }
  return { weights, biases };
}

/** y = W x + b for one layer. */
function affine(w: Matrix, b: Float64Array, x: Float64Array, out: Float64Array): void {
  for (let r = 0; r < w.rows; r++) {
    let acc = b[r];
    const base = r * w.cols;
    for (let c = 0; c < w.cols; c++) acc += w.data[base + c] * x[c];
    out[r] = acc;
  }
}

/** Network output (logits) for a single input. */
export function forward(mlp: Mlp, x: Float64Array | number[]): Float64Array {
  let h = Float64Array.from(x as ArrayLike<number>);
  for (let l = 0; l < mlp.weights.length; l++) {
    const out = new Float64Array(mlp.weights[l].rows);
    affine(mlp.weights[l], mlp.biases[l], h, out);
    if (l < mlp.weights.length - 1) {
      for (let i = 0; i < out.length; i++) if (out[i] < 0) out[i] = 0;
    }
    h = out;
  }
  return h;
}

export function predictClass(mlp: Mlp, x: Float64Array | number[]): number {
  const logits = forward(mlp, x);
  let best = 0;
  for (let i = 1; i < logits.length; i++) if (logits[i] > logits[best]) best = i;
  return best;
}

export function accuracy(mlp: Mlp, xs: Float64Array[], ys: Int32Array | number[]): number {
  let hits = 0;
  for (let i = 0; i < xs.length; i++) {
    if (predictClass(mlp, xs[i]) === ys[i]) hits++;
  }
  return hits / xs.length;
}
