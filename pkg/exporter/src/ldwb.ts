/**
 * LDWB weight-bundle writer (and a reader used by the tests).
 *
 * Layout, little-endian throughout:
 *   "LDWB" | u32 version=1 | u32 tensor_count
 *   per tensor: u16 name_len | name utf8 | u8 dtype(0=f32) | u8 rank
 *               | u32 dims[rank] | f32 payload row-major
 *   u32 CRC-32 over everything after the 8-byte magic+version prefix
 */

import { crc32 } from "./crc32";

export interface TensorEntry {
  name: string;
  dims: number[];
  data: Float32Array;
}

const MAGIC = Buffer.from("LDWB", "ascii");
const VERSION = 1;

export function writeBundle(entries: TensorEntry[]): Buffer {
  const chunks: Buffer[] = [];
  const count = Buffer.alloc(4);
  count.writeUInt32LE(entries.length, 0);
  chunks.push(count);
  const seen = new Set<string>();
  for (const e of entries) {
    if (!e.name) throw new Error("tensor name must be non-empty");
    if (seen.has(e.name)) throw new Error(`duplicate tensor name ${e.name}`);
    seen.add(e.name);
    const numel = e.dims.reduce((a, b) => a * b, 1);
    if (e.dims.some((d) => d < 1)) {
      throw new Error(`tensor ${e.name} has a zero-sized dim: [${e.dims}]`);
    }
    if (numel !== e.data.length) {
      throw new Error(
        `tensor ${e.name}: dims [${e.dims}] need ${numel} values, got ${e.data.length}`
      );
    }
    const name = Buffer.from(e.name, "utf8");
    const head = Buffer.alloc(2 + name.length + 2 + 4 * e.dims.length);
    let off = 0;
    off = head.writeUInt16LE(name.length, off);
    off += name.copy(head, off);
    off = head.writeUInt8(0, off); // dtype f32
    off = head.writeUInt8(e.dims.length, off);
    for (const d of e.dims) off = head.writeUInt32LE(d, off);
    const payload = Buffer.alloc(4 * numel);
    for (let i = 0; i < numel; i++) payload.writeFloatLE(e.data[i], 4 * i);
    chunks.push(head, payload);
  }
  const body = Buffer.concat(chunks);
  const tail = Buffer.alloc(8);
  tail.writeUInt32LE(VERSION, 0);
  tail.writeUInt32LE(crc32(body), 4);
  return Buffer.concat([MAGIC, tail.subarray(0, 4), body, tail.subarray(4, 8)]);
}

export function readBundle(buf: Buffer): TensorEntry[] {
  if (buf.length < 16 || !buf.subarray(0, 4).equals(MAGIC)) {
    throw new Error("not a weight bundle");
  }
  if (buf.readUInt32LE(4) !== VERSION) {
    throw new Error(`unsupported bundle version ${buf.readUInt32LE(4)}`);
  }
  const stored = buf.readUInt32LE(buf.length - 4);
  const actual = crc32(buf.subarray(8, buf.length - 4));
  if (stored !== actual) {
    throw new Error(`checksum mismatch: stored ${stored}, computed ${actual}`);
  }
  let off = 8;
  const count = buf.readUInt32LE(off);
  off += 4;
  const out: TensorEntry[] = [];
  for (let t = 0; t < count; t++) {
    const nameLen = buf.readUInt16LE(off);
    off += 2;
    const name = buf.subarray(off, off + nameLen).toString("utf8");
    off += nameLen;
    const dtype = buf.readUInt8(off++);
    if (dtype !== 0) throw new Error(`tensor ${name}: unsupported dtype ${dtype}`);
    const rank = buf.readUInt8(off++);
    const dims: number[] = [];
    for (let r = 0; r < rank; r++) {
      dims.push(buf.readUInt32LE(off));
      off += 4;
    }
    const numel = dims.reduce((a, b) => a * b, 1);
    const data = new Float32Array(numel);
    for (let i = 0; i < numel; i++) data[i] = buf.readFloatLE(off + 4 * i);
    off += 4 * numel;
    out.push({ name, dims, data });
  }
  return out;
}
