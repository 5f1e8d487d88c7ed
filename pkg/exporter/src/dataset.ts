/**
 * Dataset splits for the accuracy analyses: 15-class image data with a
 * fixed number of training and test samples per class, pixels normalized
 * to [0, 1], deterministic split under a fixed seed.
 *
 * The real source is an EMNIST/MNIST-style IDX pair on local disk
 * (optionally gzipped); when it is absent the error says exactly what to
 * provide. A deterministic synthetic source with the same interface keeps
 * the full pipeline runnable offline: each class is a smooth random
 * prototype image plus per-sample noise.
 */

import * as crypto from "crypto";
import * as fs from "fs";
import * as path from "path";
import * as zlib from "zlib";

import { float64Array, int64Array, npzBytes } from "./npy.js";
import { makeGaussian, makeRng, shuffled } from "./rng.js";

export interface RawSource {
  /** Per sample: pixels in [0, 1], square image, row-major. */
  images: Float64Array[];
  labels: Int32Array;
  side: number;
}

export interface SplitSpec {
  classes: number[];
  trainPerClass: number;
  testPerClass: number;
  /** Output image side length; source images are resized when it differs. */
  side: number;
  seed: number;
}

export interface SplitFiles {
  trainPath: string;
  testPath: string;
  classList: number[];
  trainHash: string;
  testHash: string;
  train: { xs: Float64Array[]; ys: number[] };
  test: { xs: Float64Array[]; ys: number[] };
}

export const DEFAULT_CLASSES = Array.from({ length: 15 }, (_, i) => i);

function readMaybeGzip(filePath: string): Buffer {
  const raw = fs.readFileSync(filePath);
  if (filePath.endsWith(".gz") || (raw[0] === 0x1f && raw[1] === 0x8b)) {
    return zlib.gunzipSync(raw);
  }
  return raw;
}

/** Parse an IDX image/label file pair (the EMNIST/MNIST container). */
export function loadIdxSource(imagesPath: string, labelsPath: string): RawSource {
  for (const p of [imagesPath, labelsPath]) {
    if (!fs.existsSync(p)) {
      throw new Error(
        `source dataset not found: ${p}\n` +
        "provide the EMNIST/MNIST IDX files (e.g. emnist-balanced-train-images-idx3-ubyte[.gz] " +
        "and the matching labels file), or use the synthetic source",
      );
    }
  }
  const img = readMaybeGzip(imagesPath);
  const lab = readMaybeGzip(labelsPath);
  if (img.readUInt32BE(0) !== 2051) throw new Error(`${imagesPath}: not an IDX image file`);
  if (lab.readUInt32BE(0) !== 2049) throw new Error(`${labelsPath}: not an IDX label file`);
  const count = img.readUInt32BE(4);
  const rows = img.readUInt32BE(8);
  const cols = img.readUInt32BE(12);
  if (rows !== cols) throw new Error(`expected square images, got ${rows}x${cols}`);
  if (lab.readUInt32BE(4) !== count) throw new Error("image/label counts differ");
  const images: Float64Array[] = [];
  const labels = new Int32Array(count);
  const pixels = rows * cols;
  for (let i = 0; i < count; i++) {
    const start = 16 + i * pixels;
    const v = new Float64Array(pixels);
    for (let p = 0; p < pixels; p++) v[p] = img[start + p] / 255;
    images.push(v);
    labels[i] = lab[8 + i];
  }
  return { images, labels, side: rows };
}

/**
 * Deterministic stand-in source: per class a smooth random prototype in
 * [0, 1], samples are the prototype plus Gaussian pixel noise, clipped.
 */
export function syntheticSource(
  classes: number[],
  perClass: number,
  side: number,
  seed: number,
  noise = 0.18,
): RawSource {
  const rng = makeRng(seed);
  const gauss = makeGaussian(rng);
  const pixels = side * side;
  const prototypes = new Map<number, Float64Array>();
  for (const cls of classes) {
    const proto = new Float64Array(pixels);
    // low-frequency pattern: a few random soft blobs per class
    const blobs = 3 + (cls % 3);
    for (let b = 0; b < blobs; b++) {
      const cx = rng() * side;
      const cy = rng() * side;
      const radius = side * (0.15 + 0.2 * rng());
      const amp = 0.5 + 0.5 * rng();
      for (let y = 0; y < side; y++) {
        for (let x = 0; x < side; x++) {
          const d2 = (x - cx) ** 2 + (y - cy) ** 2;
          proto[y * side + x] += amp * Math.exp(-d2 / (2 * radius * radius));
        }
      }
    }
    let max = 0;
    for (const v of proto) if (v > max) max = v;
    for (let p = 0; p < pixels; p++) proto[p] = max > 0 ? proto[p] / max : 0;
    prototypes.set(cls, proto);
  }
  const images: Float64Array[] = [];
  const labels = new Int32Array(classes.length * perClass);
  let i = 0;
  for (const cls of classes) {
    const proto = prototypes.get(cls)!;
    for (let s = 0; s < perClass; s++) {
      const img = new Float64Array(pixels);
      for (let p = 0; p < pixels; p++) {
        const v = proto[p] + noise * gauss();
        img[p] = v < 0 ? 0 : v > 1 ? 1 : v;
      }
      images.push(img);
      labels[i++] = cls;
    }
  }
  return { images, labels, side };
}

/** Area-weighted resample of a square image to a new side length. */
export function resizeImage(img: Float64Array, side: number, newSide: number): Float64Array {
  if (newSide === side) return img;
  const out = new Float64Array(newSide * newSide);
  const scale = side / newSide;
  for (let oy = 0; oy < newSide; oy++) {
    const y0 = oy * scale;
    const y1 = y0 + scale;
    for (let ox = 0; ox < newSide; ox++) {
      const x0 = ox * scale;
      const x1 = x0 + scale;
      let acc = 0;
      for (let y = Math.floor(y0); y < Math.min(side, Math.ceil(y1)); y++) {
        const wy = Math.min(y + 1, y1) - Math.max(y, y0);
        if (wy <= 0) continue;
        for (let x = Math.floor(x0); x < Math.min(side, Math.ceil(x1)); x++) {
          const wx = Math.min(x + 1, x1) - Math.max(x, x0);
          if (wx <= 0) continue;
          acc += wy * wx * img[y * side + x];
        }
      }
      out[oy * newSide + ox] = acc / (scale * scale);
    }
  }
  return out;
}

function writeNpz(filePath: string, xs: Float64Array[], ys: number[], dim: number): string {
  const flat = new Float64Array(xs.length * dim);
  xs.forEach((x, i) => flat.set(x, i * dim));
  const bytes = npzBytes([
    float64Array("x", flat, [xs.length, dim]),
    int64Array("y", ys, [ys.length]),
  ]);
  fs.mkdirSync(path.dirname(path.resolve(filePath)), { recursive: true });
  fs.writeFileSync(filePath, bytes);
  return crypto.createHash("sha256").update(bytes).digest("hex");
}

/**
 * Cut per-class train/test splits out of a source, resizing to
 * spec.side, and write them as npz files {x: (N, side^2), y: (N,)}.
 * The split is a seeded shuffle within each class, so a fixed seed gives
 * byte-identical files.
 */
export function makeDataset(
  source: RawSource,
  spec: SplitSpec,
  trainPath: string,
  testPath: string,
): SplitFiles {
  const byClass = new Map<number, number[]>();
  for (const cls of spec.classes) byClass.set(cls, []);
  for (let i = 0; i < source.labels.length; i++) {
    byClass.get(source.labels[i])?.push(i);
  }
  const rng = makeRng(spec.seed);
  const trainX: Float64Array[] = [];
  const trainY: number[] = [];
  const testX: Float64Array[] = [];
  const testY: number[] = [];
  for (const cls of spec.classes) {
    const pool = byClass.get(cls)!;
    const need = spec.trainPerClass + spec.testPerClass;
    if (pool.length < need) {
      throw new Error(
        `class ${cls}: only ${pool.length} source samples, need ${need} ` +
        `(${spec.trainPerClass} train + ${spec.testPerClass} test)`,
      );
    }
    const order = shuffled(pool.length, rng);
    for (let k = 0; k < need; k++) {
      const img = resizeImage(source.images[pool[order[k]]], source.side, spec.side);
      if (k < spec.trainPerClass) {
        trainX.push(img);
        trainY.push(cls);
      } else {
        testX.push(img);
        testY.push(cls);
      }
    }
  }
  const dim = spec.side * spec.side;
  const trainHash = writeNpz(trainPath, trainX, trainY, dim);
  const testHash = writeNpz(testPath, testX, testY, dim);
  return {
    trainPath,
    testPath,
    classList: [...spec.classes],
    trainHash,
    testHash,
    train: { xs: trainX, ys: trainY },
    test: { xs: testX, ys: testY },
  };
}
