/** Binary PPM (P6, maxval 255) reading/writing for test fixtures. */

export interface RgbImage {
  width: number;
  height: number;
  /** row-major RGB triples, length 3*w*h */
  pixels: Uint8Array;
}

export function writePpm(img: RgbImage): Buffer {
  if (img.pixels.length !== 3 * img.width * img.height) {
    throw new Error(`PPM: ${img.width}x${img.height} needs ${3 * img.width * img.height} bytes`);
  }
  const header = Buffer.from(`P6\n${img.width} ${img.height}\n255\n`, "ascii");
  return Buffer.concat([header, Buffer.from(img.pixels)]);
}

export function readPpm(buf: Buffer): RgbImage {
  const text = buf.subarray(0, 64).toString("latin1");
  const m = /^P6\s+(\d+)\s+(\d+)\s+255\s/.exec(text);
  if (!m) throw new Error("not a binary P6 PPM with maxval 255");
  const width = parseInt(m[1], 10);
  const height = parseInt(m[2], 10);
  const start = m[0].length;
  const need = 3 * width * height;
  if (buf.length < start + need) throw new Error("PPM pixel data truncated");
  return { width, height, pixels: Uint8Array.from(buf.subarray(start, start + need)) };
}
