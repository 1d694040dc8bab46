import { describe, expect, it } from "vitest";

import { crc32 } from "../src/crc32";
import { readBundle, writeBundle } from "../src/ldwb";
import { readFloatMap, writeFloatMap } from "../src/ldrf";
import { readSafetensors, writeSafetensors } from "../src/safetensors";

describe("crc32", () => {
  it("matches the published IEEE check value", () => {
    // CRC-32("123456789") = 0xCBF43926
    expect(crc32(Buffer.from("123456789", "ascii"))).toBe(0xcbf43926);
  });
});

describe("ldwb", () => {
  it("an empty bundle is exactly 16 bytes", () => {
    const blob = writeBundle([]);
    expect(blob.length).toBe(16);
    expect(blob.subarray(0, 4).toString("ascii")).toBe("LDWB");
    expect(readBundle(blob)).toEqual([]);
  });

  it("round-trips tensors bit-exactly", () => {
    const entries = [
      { name: "enc1a.weight", dims: [2, 3, 3, 3], data: new Float32Array(54).map((_, i) => Math.fround(Math.sin(i))) },
      { name: "enc1a.bias", dims: [2], data: new Float32Array([0.5, -1.25]) },
    ];
    const back = readBundle(writeBundle(entries));
    expect(back.map((e) => e.name)).toEqual(["enc1a.weight", "enc1a.bias"]);
    expect([...back[0].data]).toEqual([...entries[0].data]);
    expect(back[0].dims).toEqual([2, 3, 3, 3]);
  });

  it("is byte-deterministic", () => {
    const entries = [{ name: "t", dims: [4], data: new Float32Array([1, 2, 3, 4]) }];
    expect(writeBundle(entries).equals(writeBundle(entries))).toBe(true);
  });

  it("detects payload corruption", () => {
    const blob = Buffer.from(writeBundle([{ name: "t", dims: [4], data: new Float32Array([1, 2, 3, 4]) }]));
    blob[blob.length - 8] ^= 0x20;
    expect(() => readBundle(blob)).toThrow(/checksum/);
  });
});

describe("ldrf", () => {
  it("round-trips a float map", () => {
    const map = { width: 3, height: 2, data: new Float32Array([0, 0.25, 0.5, 0.75, 1, 0.125]) };
    const back = readFloatMap(writeFloatMap(map));
    expect(back.width).toBe(3);
    expect(back.height).toBe(2);
    expect([...back.data]).toEqual([...map.data]);
  });

  it("rejects truncated streams", () => {
    const blob = writeFloatMap({ width: 2, height: 2, data: new Float32Array(4) });
    expect(() => readFloatMap(blob.subarray(0, blob.length - 3))).toThrow();
  });
});

describe("safetensors", () => {
  it("round-trips float32 tensors", () => {
    const ckpt = new Map([
      ["a/kernel", { shape: [2, 2], data: new Float32Array([1, 2, 3, 4]) }],
      ["a/bias", { shape: [2], data: new Float32Array([-1, 1]) }],
    ]);
    const back = readSafetensors(writeSafetensors(ckpt));
    expect([...back.keys()].sort()).toEqual(["a/bias", "a/kernel"]);
    expect([...back.get("a/kernel")!.data]).toEqual([1, 2, 3, 4]);
    expect(back.get("a/kernel")!.shape).toEqual([2, 2]);
  });

  it("rejects non-F32 dtypes", () => {
    const header = JSON.stringify({ x: { dtype: "F16", shape: [1], data_offsets: [0, 2] } });
    const lenBuf = Buffer.alloc(8);
    lenBuf.writeBigUInt64LE(BigInt(header.length), 0);
    const blob = Buffer.concat([lenBuf, Buffer.from(header), Buffer.alloc(2)]);
    expect(() => readSafetensors(blob)).toThrow(/F32/);
  });
});
