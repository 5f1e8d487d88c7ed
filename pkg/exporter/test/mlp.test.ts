import { describe, expect, it } from "vitest";

import { accuracy, forward, initMlp, widthsOf, Mlp } from "../src/mlp.js";
import { makeRng } from "../src/rng.js";
import { trainClassifier } from "../src/train.js";
import { DEFAULT_CLASSES, syntheticSource } from "../src/dataset.js";

describe("rng", () => {
  it("is deterministic per seed", () => {
    const a = makeRng(42);
    const b = makeRng(42);
    for (let i = 0; i < 100; i++) expect(a()).toBe(b());
  });

  it("differs across seeds", () => {
    expect(makeRng(1)()).not.toBe(makeRng(2)());
  });
});

describe("mlp", () => {
  it("computes a hand-checked forward pass", () => {
    // one hidden neuron: relu(x - 0.5), identity output
    const mlp: Mlp = {
      weights: [
        { rows: 1, cols: 1, data: Float64Array.from([1]) },
        { rows: 1, cols: 1, data: Float64Array.from([1]) },
      ],
      biases: [Float64Array.from([-0.5]), Float64Array.from([0])],
    };
    expect(forward(mlp, [0.9])[0]).toBeCloseTo(0.4, 12);
    expect(forward(mlp, [0.2])[0]).toBe(0);
  });

  it("init matches requested widths and is seed-deterministic", () => {
    const a = initMlp([4, 5, 3], 7);
    const b = initMlp([4, 5, 3], 7);
    expect(widthsOf(a)).toEqual([4, 5, 3]);
    expect(Array.from(a.weights[0].data)).toEqual(Array.from(b.weights[0].data));
  });
});

describe("training", () => {
  it("reduces loss and beats chance on the synthetic classes", () => {
    const side = 4;
    const source = syntheticSource(DEFAULT_CLASSES, 60, side, 11);
    const xs = source.images;
    const ys = Array.from(source.labels);
    const { mlp, losses } = trainClassifier(xs, ys, {
      widths: [side * side, 10, 15],
      seed: 11,
      epochs: 30,
      batchSize: 32,
    });
    expect(losses.at(-1)!).toBeLessThan(losses[0]);
    expect(accuracy(mlp, xs, ys)).toBeGreaterThan(3 / 15);
  });

  it("is deterministic under a fixed seed", () => {
    const source = syntheticSource(DEFAULT_CLASSES.slice(0, 4), 30, 3, 5);
    const config = { widths: [9, 6, 4], seed: 5, epochs: 3 };
    const a = trainClassifier(source.images, Array.from(source.labels), config);
    const b = trainClassifier(source.images, Array.from(source.labels), config);
    expect(Array.from(a.mlp.weights[0].data)).toEqual(Array.from(b.mlp.weights[0].data));
    expect(a.losses).toEqual(b.losses);
  });
});
