/** LDRF raw float maps: "LDRF" | u32 width | u32 height | f32 row-major. */

export interface FloatMap {
  width: number;
  height: number;
  data: Float32Array;
}

const MAGIC = Buffer.from("LDRF", "ascii");

export function writeFloatMap(map: FloatMap): Buffer {
  if (map.data.length !== map.width * map.height) {
    throw new Error(
      `LDRF: ${map.width}x${map.height} needs ${map.width * map.height} values, got ${map.data.length}`
    );
  }
  const buf = Buffer.alloc(12 + 4 * map.data.length);
  MAGIC.copy(buf, 0);
  buf.writeUInt32LE(map.width, 4);
  buf.writeUInt32LE(map.height, 8);
  for (let i = 0; i < map.data.length; i++) buf.writeFloatLE(map.data[i], 12 + 4 * i);
  return buf;
}

export function readFloatMap(buf: Buffer): FloatMap {
  if (buf.length < 12 || !buf.subarray(0, 4).equals(MAGIC)) {
    throw new Error("not an LDRF float map");
  }
  const width = buf.readUInt32LE(4);
  const height = buf.readUInt32LE(8);
  const numel = width * height;
  if (buf.length !== 12 + 4 * numel) {
    throw new Error(`LDRF: expected ${12 + 4 * numel} bytes for ${width}x${height}, got ${buf.length}`);
  }
  const data = new Float32Array(numel);
  for (let i = 0; i < numel; i++) data[i] = buf.readFloatLE(12 + 4 * i);
  return { width, height, data };
}
