/**
 * Batch proxy-label generation: run an external teacher command over an
 * image folder and normalize each raw inverse-depth map to [0, 1].
 *
 * The teacher is any command template with {in} and {out} placeholders; it
 * must write an LDRF float map to {out}. Normalization is per-image
 * min-max (the student's sigmoid range needs a bounded target); a constant
 * teacher map degenerates to all-0.5 with a warning. Unreadable images and
 * failing teacher runs are warned about and skipped. Outputs are written
 * atomically (temp + rename), so re-runs with a deterministic teacher are
 * byte-identical.
 */

import { execFileSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { readFloatMap, writeFloatMap } from "./ldrf";

const IMAGE_EXTENSIONS = new Set([".png", ".ppm", ".jpg", ".jpeg"]);

export interface DistillOptions {
  warn?: (message: string) => void;
}

function runTeacher(template: string, input: string, output: string): void {
  const cmd = template.replace(/\{in\}/g, input).replace(/\{out\}/g, output);
  execFileSync("/bin/sh", ["-c", cmd], { stdio: ["ignore", "ignore", "pipe"] });
}

export function normalizeProxy(values: Float32Array, warn: (m: string) => void, label: string): Float32Array {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  const out = new Float32Array(values.length);
  if (!(hi > lo)) {
    warn(`${label}: constant teacher output, emitting an all-0.5 map`);
    out.fill(0.5);
    return out;
  }
  const span = hi - lo;
  for (let i = 0; i < values.length; i++) out[i] = (values[i] - lo) / span;
  return out;
}

export function distillProxyLabels(
  imageDir: string,
  teacherCmd: string,
  outputDir: string,
  opts: DistillOptions = {}
): number {
  const warn = opts.warn ?? ((m) => console.error(`warning: ${m}`));
  const files = fs
    .readdirSync(imageDir)
    .filter((f) => IMAGE_EXTENSIONS.has(path.extname(f).toLowerCase()))
    .sort();
  if (files.length === 0) {
    throw new Error(`no images (${[...IMAGE_EXTENSIONS].join(", ")}) in ${imageDir}`);
  }
  fs.mkdirSync(outputDir, { recursive: true });

  let written = 0;
  for (const file of files) {
    const input = path.join(imageDir, file);
    const stem = path.basename(file, path.extname(file));
    const target = path.join(outputDir, `${stem}.ldrf`);
    const scratch = path.join(os.tmpdir(), `teacher-${process.pid}-${stem}.ldrf`);
    try {
      runTeacher(teacherCmd, input, scratch);
      const raw = readFloatMap(fs.readFileSync(scratch));
      const normalized = normalizeProxy(raw.data, warn, file);
      const blob = writeFloatMap({ width: raw.width, height: raw.height, data: normalized });
      const tmp = path.join(outputDir, `.${stem}.ldrf.tmp-${process.pid}`);
      fs.writeFileSync(tmp, blob);
      fs.renameSync(tmp, target);
      written += 1;
    } catch (err) {
      warn(`${file}: skipped (${err instanceof Error ? err.message.trim() : err})`);
    } finally {
      fs.rmSync(scratch, { force: true });
    }
  }
  return written;
}
