/**
 * Minimal safetensors reader/writer, float32 only.
 *
 * Format: u64 little-endian header length, JSON header mapping tensor name
 * to { dtype, shape, data_offsets: [begin, end] } (offsets relative to the
 * data section), then the raw data.
 */

export interface CheckpointTensor {
  shape: number[];
  data: Float32Array;
}

export type Checkpoint = Map<string, CheckpointTensor>;

interface HeaderEntry {
  dtype: string;
  shape: number[];
  data_offsets: [number, number];
}

export function writeSafetensors(tensors: Checkpoint): Buffer {
  const header: Record<string, HeaderEntry> = {};
  let offset = 0;
  const blobs: Buffer[] = [];
  for (const [name, t] of tensors) {
    const numel = t.shape.reduce((a, b) => a * b, 1);
    if (numel !== t.data.length) {
      throw new Error(`tensor ${name}: shape [${t.shape}] vs ${t.data.length} values`);
    }
    const bytes = Buffer.alloc(4 * numel);
    for (let i = 0; i < numel; i++) bytes.writeFloatLE(t.data[i], 4 * i);
    header[name] = { dtype: "F32", shape: t.shape, data_offsets: [offset, offset + bytes.length] };
    offset += bytes.length;
    blobs.push(bytes);
  }
  const json = Buffer.from(JSON.stringify(header), "utf8");
  const lenBuf = Buffer.alloc(8);
  lenBuf.writeBigUInt64LE(BigInt(json.length), 0);
  return Buffer.concat([lenBuf, json, ...blobs]);
}

export function readSafetensors(buf: Buffer): Checkpoint {
  if (buf.length < 8) throw new Error("not a safetensors file (too short)");
  const headerLen = Number(buf.readBigUInt64LE(0));
  if (8 + headerLen > buf.length) {
    throw new Error(`safetensors header claims ${headerLen} bytes, file has ${buf.length}`);
  }
  const header = JSON.parse(buf.subarray(8, 8 + headerLen).toString("utf8"));
  const dataStart = 8 + headerLen;
  const out: Checkpoint = new Map();
  for (const [name, entry] of Object.entries(header)) {
    if (name === "__metadata__") continue;
    const e = entry as HeaderEntry;
    if (e.dtype !== "F32") {
      throw new Error(`tensor ${name}: only F32 checkpoints are supported, got ${e.dtype}`);
    }
    const [begin, end] = e.data_offsets;
    const numel = e.shape.reduce((a, b) => a * b, 1);
    if (end - begin !== 4 * numel || dataStart + end > buf.length) {
      throw new Error(`tensor ${name}: bad data offsets [${begin}, ${end}]`);
    }
    const data = new Float32Array(numel);
    for (let i = 0; i < numel; i++) data[i] = buf.readFloatLE(dataStart + begin + 4 * i);
    out.set(name, { shape: e.shape, data });
  }
  return out;
}
