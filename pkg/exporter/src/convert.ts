/**
 * Checkpoint -> LDWB conversion.
 *
 * The checkpoint is a safetensors file; MAP.json is a flat object from the
 * runtime's bundle keys ("enc1a.weight", ...) to checkpoint tensor names.
 * Kernels are transposed from the checkpoint's [kh, kw, in, out] layout to
 * the runtime's (out, in, kh, kw). The output is written atomically:
 * a temp file in the same directory, renamed on success.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { TensorEntry, writeBundle } from "./ldwb";
import {
  checkpointShape,
  presetWeightShapes,
  transposeKernel,
} from "./preset";
import { readSafetensors } from "./safetensors";

export interface ExportSummary {
  tensors: { name: string; dims: number[] }[];
  bytesWritten: number;
}

function shapesEqual(a: number[], b: number[]): boolean {
  return a.length === b.length && a.every((v, i) => v === b[i]);
}

export function exportCheckpoint(
  checkpointPath: string,
  nameMap: Record<string, string>,
  outputPath: string
): ExportSummary {
  const ckpt = readSafetensors(fs.readFileSync(checkpointPath));
  const wanted = presetWeightShapes();

  const unmapped = [...wanted.keys()].filter((k) => !(k in nameMap));
  if (unmapped.length > 0) {
    throw new Error(`name map does not cover preset keys: ${unmapped.join(", ")}`);
  }
  const missing = [...wanted.keys()].filter((k) => !ckpt.has(nameMap[k]));
  if (missing.length > 0) {
    throw new Error(
      `checkpoint is missing tensors for preset keys: ${missing
        .map((k) => `${k} -> ${nameMap[k]}`)
        .join(", ")}`
    );
  }

  const entries: TensorEntry[] = [];
  for (const [key, runtimeShape] of wanted) {
    const src = ckpt.get(nameMap[key])!;
    const expect = checkpointShape(key, runtimeShape);
    if (!shapesEqual(src.shape, expect)) {
      throw new Error(
        `${key}: checkpoint tensor ${nameMap[key]} has shape [${src.shape}], expected [${expect}]`
      );
    }
    const data = key.endsWith(".weight")
      ? transposeKernel(src.data, src.shape)
      : src.data;
    entries.push({ name: key, dims: runtimeShape, data });
  }

  const blob = writeBundle(entries);
  const tmp = path.join(
    path.dirname(path.resolve(outputPath)),
    `.${path.basename(outputPath)}.tmp-${process.pid}`
  );
  fs.writeFileSync(tmp, blob);
  fs.renameSync(tmp, outputPath);
  return {
    tensors: entries.map((e) => ({ name: e.name, dims: e.dims })),
    bytesWritten: blob.length,
  };
}

export function loadNameMap(mapPath: string): Record<string, string> {
  const parsed = JSON.parse(fs.readFileSync(mapPath, "utf8"));
  if (typeof parsed !== "object" || parsed === null || Array.isArray(parsed)) {
    throw new Error(`${mapPath}: expected a flat JSON object`);
  }
  for (const [k, v] of Object.entries(parsed)) {
    if (typeof v !== "string") throw new Error(`${mapPath}: value for ${k} is not a string`);
  }
  return parsed as Record<string, string>;
}
