/**
 * The pyramidal depth network's weight contract, mirrored from the runtime
 * (see the runtime README, "Network and conventions").
 *
 * Runtime bundle layout per conv: "<layer>.weight" (out, in, 3, 3) and
 * "<layer>.bias" (out,). Checkpoints produced by TensorFlow-style
 * frameworks store kernels as [kh, kw, in, out]; the exporter transposes.
 */

export const ENCODER_CHANNELS = [16, 32, 64, 96, 128, 192];
export const ESTIMATOR_CHANNELS = [96, 64, 32, 8];
export const LEAKY_SLOPE = 0.2;

export interface ConvDef {
  /** layer name; bundle keys are `${name}.weight` / `${name}.bias` */
  name: string;
  inCh: number;
  outCh: number;
  stride: number;
}

/** Every convolution of the preset, in execution order. */
export function presetConvs(): ConvDef[] {
  const convs: ConvDef[] = [];
  let cin = 3;
  for (let lvl = 1; lvl <= 6; lvl++) {
    const ch = ENCODER_CHANNELS[lvl - 1];
    convs.push({ name: `enc${lvl}a`, inCh: cin, outCh: ch, stride: 2 });
    convs.push({ name: `enc${lvl}b`, inCh: ch, outCh: ch, stride: 1 });
    cin = ch;
  }
  for (let lvl = 6; lvl >= 1; lvl--) {
    if (lvl < 6) {
      convs.push({ name: `up${lvl}`, inCh: 8, outCh: 8, stride: 1 });
    }
    let c = ENCODER_CHANNELS[lvl - 1] + (lvl < 6 ? 8 : 0);
    for (let k = 0; k < ESTIMATOR_CHANNELS.length; k++) {
      convs.push({ name: `dec${lvl}_${k}`, inCh: c, outCh: ESTIMATOR_CHANNELS[k], stride: 1 });
      c = ESTIMATOR_CHANNELS[k];
    }
    convs.push({ name: `head${lvl}`, inCh: 8, outCh: 1, stride: 1 });
  }
  return convs;
}

/** Bundle key -> expected runtime dims for every weight the graph binds. */
export function presetWeightShapes(): Map<string, number[]> {
  const shapes = new Map<string, number[]>();
  for (const c of presetConvs()) {
    shapes.set(`${c.name}.weight`, [c.outCh, c.inCh, 3, 3]);
    shapes.set(`${c.name}.bias`, [c.outCh]);
  }
  return shapes;
}

/** Checkpoint-side (TensorFlow-layout) shape for a bundle key. */
export function checkpointShape(bundleKey: string, runtimeShape: number[]): number[] {
  if (bundleKey.endsWith(".weight")) {
    const [out, input, kh, kw] = runtimeShape;
    return [kh, kw, input, out];
  }
  return runtimeShape;
}

/** [kh, kw, in, out] checkpoint kernel -> (out, in, kh, kw) runtime order. */
export function transposeKernel(data: Float32Array, shape: number[]): Float32Array {
  const [kh, kw, inCh, outCh] = shape;
  const out = new Float32Array(data.length);
  for (let y = 0; y < kh; y++) {
    for (let x = 0; x < kw; x++) {
      for (let i = 0; i < inCh; i++) {
        for (let o = 0; o < outCh; o++) {
          const src = ((y * kw + x) * inCh + i) * outCh + o;
          const dst = ((o * inCh + i) * kh + y) * kw + x;
          out[dst] = data[src];
        }
      }
    }
  }
  return out;
}
