/**
 * Reference forward pass of the pyramidal network, straight from a
 * checkpoint, on the checkpoint's native framework (tfjs). Used to verify
 * that an exported bundle reproduces the source model in the runtime.
 *
 * Numeric conventions deliberately mirror the runtime contract: explicit
 * symmetric zero padding + VALID convs (so stride-2 output extents floor),
 * leaky ReLU slope 0.2, and bilinear x2 upsampling with half-pixel centers
 * realized as two interpolation-matrix multiplies (tfjs' own resize ops
 * are not used, so no convention drift can sneak in).
 */

import * as tf from "@tensorflow/tfjs";

import { Checkpoint } from "./safetensors";
import {
  ESTIMATOR_CHANNELS,
  LEAKY_SLOPE,
  presetConvs,
  presetWeightShapes,
} from "./preset";

/** Interpolation matrix [n*2, n] for half-pixel-center x2 upsampling. */
function upsampleMatrix(n: number): tf.Tensor2D {
  const rows = 2 * n;
  const m = new Float32Array(rows * n);
  for (let i = 0; i < rows; i++) {
    let src = (i + 0.5) / 2 - 0.5;
    src = Math.min(Math.max(src, 0), n - 1);
    const lo = Math.floor(src);
    const hi = Math.min(lo + 1, n - 1);
    const f = src - lo;
    m[i * n + lo] += 1 - f;
    m[i * n + hi] += f;
  }
  return tf.tensor2d(m, [rows, n]);
}

/** Bilinear x2 on [1, h, w, c] via row and column matrix products. */
function upsample2x(x: tf.Tensor4D): tf.Tensor4D {
  return tf.tidy(() => {
    const [, h, w, c] = x.shape;
    const ah = upsampleMatrix(h);
    const aw = upsampleMatrix(w);
    const rows = tf
      .matMul(ah, x.reshape([h, w * c]))
      .reshape([2 * h, w, c]);
    const cols = tf
      .matMul(aw, rows.transpose([1, 0, 2]).reshape([w, 2 * h * c]))
      .reshape([2 * w, 2 * h, c])
      .transpose([1, 0, 2]);
    return cols.reshape([1, 2 * h, 2 * w, c]) as tf.Tensor4D;
  });
}

function convBlock(
  x: tf.Tensor4D,
  ckpt: Checkpoint,
  nameMap: Record<string, string>,
  layer: string,
  stride: number,
  activation: "leaky" | "none"
): tf.Tensor4D {
  return tf.tidy(() => {
    const kEntry = ckpt.get(nameMap[`${layer}.weight`]);
    const bEntry = ckpt.get(nameMap[`${layer}.bias`]);
    if (!kEntry || !bEntry) throw new Error(`checkpoint is missing ${layer}`);
    const kernel = tf.tensor4d(kEntry.data, kEntry.shape as [number, number, number, number]);
    const bias = tf.tensor1d(bEntry.data);
    const padded = tf.pad(x, [[0, 0], [1, 1], [1, 1], [0, 0]]) as tf.Tensor4D;
    let y = tf.conv2d(padded, kernel, [stride, stride], "valid");
    y = tf.add(y, bias);
    if (activation === "leaky") y = tf.leakyRelu(y, LEAKY_SLOPE);
    return y as tf.Tensor4D;
  });
}

export interface ForwardResult {
  /** full-resolution relative inverse depth, row-major (h, w) */
  depth: Float32Array;
  height: number;
  width: number;
}

/**
 * Run the network on an RGB image given as [0,1] floats, NHWC [1,h,w,3];
 * h and w must divide by 64.
 */
export function runNetwork(
  ckpt: Checkpoint,
  nameMap: Record<string, string>,
  image: Float32Array,
  height: number,
  width: number
): ForwardResult {
  const out = tf.tidy(() => {
    let x = tf.tensor4d(image, [1, height, width, 3]);
    const encoder: tf.Tensor4D[] = [];
    for (let lvl = 1; lvl <= 6; lvl++) {
      x = convBlock(x, ckpt, nameMap, `enc${lvl}a`, 2, "leaky");
      x = convBlock(x, ckpt, nameMap, `enc${lvl}b`, 1, "leaky");
      encoder.push(x);
    }
    let below: tf.Tensor4D | null = null;
    let topHead: tf.Tensor4D | null = null;
    for (let lvl = 6; lvl >= 1; lvl--) {
      let feat = encoder[lvl - 1];
      if (below !== null) {
        const up = convBlock(upsample2x(below), ckpt, nameMap, `up${lvl}`, 1, "leaky");
        feat = tf.concat([feat, up], 3) as tf.Tensor4D;
      }
      let est = feat;
      for (let k = 0; k < ESTIMATOR_CHANNELS.length; k++) {
        est = convBlock(est, ckpt, nameMap, `dec${lvl}_${k}`, 1, "leaky");
      }
      below = est;
      if (lvl === 1) {
        topHead = tf.sigmoid(convBlock(est, ckpt, nameMap, `head${lvl}`, 1, "none"));
      }
    }
    return upsample2x(topHead!);
  });
  const depth = out.dataSync() as Float32Array;
  out.dispose();
  return { depth: Float32Array.from(depth), height, width };
}

/** Deterministic fan-in-scaled random checkpoint in TensorFlow layout. */
export function randomCheckpoint(seed: number): Checkpoint {
  // xorshift128, good enough for reproducible test weights
  let s0 = seed ^ 0x9e3779b9 || 1;
  let s1 = (seed * 0x85ebca6b) | 1;
  const next = () => {
    let x = s0;
    const y = s1;
    s0 = y;
    x ^= x << 23;
    x ^= x >>> 17;
    x ^= y ^ (y >>> 26);
    s1 = x;
    return ((s0 + s1) >>> 0) / 0x100000000;
  };
  const gauss = () => {
    const u = Math.max(next(), 1e-12);
    const v = next();
    return Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * v);
  };
  const ckpt: Checkpoint = new Map();
  for (const c of presetConvs()) {
    const std = Math.sqrt(2 / (c.inCh * 9));
    const kernel = new Float32Array(3 * 3 * c.inCh * c.outCh);
    for (let i = 0; i < kernel.length; i++) kernel[i] = gauss() * std;
    const bias = new Float32Array(c.outCh);
    for (let i = 0; i < bias.length; i++) bias[i] = gauss() * 0.01;
    ckpt.set(`model/${c.name}/kernel`, { shape: [3, 3, c.inCh, c.outCh], data: kernel });
    ckpt.set(`model/${c.name}/bias`, { shape: [c.outCh], data: bias });
  }
  return ckpt;
}

/** The name map matching randomCheckpoint's naming scheme. */
export function defaultNameMap(): Record<string, string> {
  const map: Record<string, string> = {};
  for (const key of presetWeightShapes().keys()) {
    const [layer, kind] = key.split(".");
    map[key] = `model/${layer}/${kind === "weight" ? "kernel" : "bias"}`;
  }
  return map;
}
