/**
 * Adam training for the small classifiers whose region structure gets
 * enumerated downstream: softmax cross-entropy, minibatches, fixed seed.
 */

import { Mlp, Matrix, zerosMatrix, initMlp } from "./mlp.js";
import { makeRng, shuffled } from "./rng.js";

export interface TrainConfig {
  widths: number[];
  seed: number;
  epochs: number;
  batchSize?: number;
  learningRate?: number;
}

export interface TrainResult {
  mlp: Mlp;
  losses: number[];
}

interface AdamState {
  m: Float64Array;
  v: Float64Array;
}

/**
 * Train a fresh MLP on (xs, ys). Adam with lr 1e-3, batch 128 by default;
 * 2/fan-in Gaussian weight init. Deterministic for a fixed seed.
 */
export function trainClassifier(
  xs: Float64Array[],
  ys: Int32Array | number[],
  config: TrainConfig,
): TrainResult {
  const { widths, seed, epochs } = config;
  const batchSize = config.batchSize ?? 128;
  const lr = config.learningRate ?? 1e-3;
  const beta1 = 0.9;
  const beta2 = 0.999;
  const eps = 1e-8;

  const mlp = initMlp(widths, seed);
  const rng = makeRng(seed ^ 0x5eed);
  const L = mlp.weights.length;

  const wState: AdamState[] = mlp.weights.map((w) => ({
    m: new Float64Array(w.data.length),
    v: new Float64Array(w.data.length),
  }));
  const bState: AdamState[] = mlp.biases.map((b) => ({
    m: new Float64Array(b.length),
    v: new Float64Array(b.length),
  }));

  const gradW: Matrix[] = mlp.weights.map((w) => zerosMatrix(w.rows, w.cols));
  const gradB: Float64Array[] = mlp.biases.map((b) => new Float64Array(b.length));

  let step = 0;
  const losses: number[] = [];
  for (let epoch = 0; epoch < epochs; epoch++) {
    const order = shuffled(xs.length, rng);
    let epochLoss = 0;
    for (let start = 0; start < order.length; start += batchSize) {
      const batch = order.slice(start, start + batchSize);
      for (const g of gradW) g.data.fill(0);
      for (const g of gradB) g.fill(0);

      let batchLoss = 0;
      for (const idx of batch) {
        batchLoss += accumulateSampleGrads(mlp, xs[idx], ys[idx] as number, gradW, gradB);
      }
      epochLoss += batchLoss;
      const scale = 1 / batch.length;
      step++;
      const corr1 = 1 - Math.pow(beta1, step);
      const corr2 = 1 - Math.pow(beta2, step);
      for (let l = 0; l < L; l++) {
        adamUpdate(mlp.weights[l].data, gradW[l].data, wState[l], scale, lr, beta1, beta2, eps, corr1, corr2);
        adamUpdate(mlp.biases[l], gradB[l], bState[l], scale, lr, beta1, beta2, eps, corr1, corr2);
      }
    }
    losses.push(epochLoss / xs.length);
  }
  return { mlp, losses };
}

function adamUpdate(
  params: Float64Array,
  grads: Float64Array,
  state: AdamState,
  gradScale: number,
  lr: number,
  beta1: number,
  beta2: number,
  eps: number,
  corr1: number,
  corr2: number,
): void {
  for (let i = 0; i < params.length; i++) {
    const g = grads[i] * gradScale;
    state.m[i] = beta1 * state.m[i] + (1 - beta1) * g;
    state.v[i] = beta2 * state.v[i] + (1 - beta2) * g * g;
    const mHat = state.m[i] / corr1;
    const vHat = state.v[i] / corr2;
    params[i] -= (lr * mHat) / (Math.sqrt(vHat) + eps);
  }
}

/** Backprop one sample; returns its cross-entropy loss. */
function accumulateSampleGrads(
  mlp: Mlp,
  x: Float64Array,
  label: number,
  gradW: Matrix[],
  gradB: Float64Array[],
): number {
  const L = mlp.weights.length;
  const activations: Float64Array[] = [x];
  const preacts: Float64Array[] = [];
  let h = x;
  for (let l = 0; l < L; l++) {
    const w = mlp.weights[l];
    const pre = new Float64Array(w.rows);
    for (let r = 0; r < w.rows; r++) {
      let acc = mlp.biases[l][r];
      const base = r * w.cols;
      for (let c = 0; c < w.cols; c++) acc += w.data[base + c] * h[c];
      pre[r] = acc;
    }
    preacts.push(pre);
    if (l < L - 1) {
      const act = new Float64Array(pre.length);
      for (let i = 0; i < pre.length; i++) act[i] = pre[i] > 0 ? pre[i] : 0;
      activations.push(act);
      h = act;
    }
  }

  // softmax cross-entropy on the last pre-activation
  const logits = preacts[L - 1];
  let maxLogit = -Infinity;
  for (const v of logits) if (v > maxLogit) maxLogit = v;
  let z = 0;
  for (const v of logits) z += Math.exp(v - maxLogit);
  const loss = Math.log(z) - (logits[label] - maxLogit);

  let delta = new Float64Array(logits.length);
  for (let i = 0; i < logits.length; i++) {
    delta[i] = Math.exp(logits[i] - maxLogit) / z - (i === label ? 1 : 0);
  }

  for (let l = L - 1; l >= 0; l--) {
    const w = mlp.weights[l];
    const below = activations[l];
    for (let r = 0; r < w.rows; r++) {
      gradB[l][r] += delta[r];
      const base = r * w.cols;
      for (let c = 0; c < w.cols; c++) gradW[l].data[base + c] += delta[r] * below[c];
    }
    if (l > 0) {
      const nextDelta = new Float64Array(w.cols);
      for (let c = 0; c < w.cols; c++) {
        if (preacts[l - 1][c] <= 0) continue; // dead ReLU passes no gradient
        let acc = 0;
        for (let r = 0; r < w.rows; r++) acc += w.data[r * w.cols + c] * delta[r];
        nextDelta[c] = acc;
      }
      delta = nextDelta;
    }
  }
  return loss;
}
