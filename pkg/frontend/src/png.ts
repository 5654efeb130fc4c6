import * as zlib from "node:zlib";
import { Raster } from "./raster.js";

// === minimal PNG encoder ===================================================
// 8-bit RGBA, filter 0, one IDAT; tEXt chunks carry the figure's data
// manifest so the plotted values travel inside the image file.

const SIGNATURE = Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(buf: Buffer): number {
  let c = 0xffffffff;
  for (let i = 0; i < buf.length; i++) {
    c = CRC_TABLE[(c ^ buf[i]) & 0xff] ^ (c >>> 8);
  }
  return (c ^ 0xffffffff) >>> 0;
}

function chunk(type: string, data: Buffer): Buffer {
  const head = Buffer.concat([Buffer.from(type, "latin1"), data]);
  const out = Buffer.alloc(head.length + 8);
  out.writeUInt32BE(data.length, 0);
  head.copy(out, 4);
  out.writeUInt32BE(crc32(head), head.length + 4);
  return out;
}

function toLatin1(text: string): string {
  // tEXt is latin-1 only; escape anything outside it
  return text.replace(/[^\x20-\x7e\n]/g, (ch) => `\\u${ch.charCodeAt(0).toString(16).padStart(4, "0")}`);
}

export function encodePng(raster: Raster, texts: [string, string][]): Buffer {
  const { width, height, pixels } = raster;
  const stride = width * 4;
  const filtered = Buffer.alloc((stride + 1) * height);
  for (let y = 0; y < height; y++) {
    filtered[y * (stride + 1)] = 0; // filter type none
    Buffer.from(pixels.buffer, pixels.byteOffset + y * stride, stride).copy(
      filtered,
      y * (stride + 1) + 1
    );
  }
  const ihdr = Buffer.alloc(13);
  ihdr.writeUInt32BE(width, 0);
  ihdr.writeUInt32BE(height, 4);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 6; // color type RGBA
  const parts = [SIGNATURE, chunk("IHDR", ihdr)];
  for (const [keyword, text] of texts) {
    parts.push(chunk("tEXt", Buffer.from(`${keyword}\0${toLatin1(text)}`, "latin1")));
  }
  parts.push(chunk("IDAT", zlib.deflateSync(filtered, { level: 9 })));
  parts.push(chunk("IEND", Buffer.alloc(0)));
  return Buffer.concat(parts);
}

// read the tEXt chunks back (round-trip checks)
export function readPngTexts(png: Buffer): Record<string, string> {
  if (!png.subarray(0, 8).equals(SIGNATURE)) {
    throw new Error("not a PNG file");
  }
  const out: Record<string, string> = {};
  let offset = 8;
  while (offset + 8 <= png.length) {
    const length = png.readUInt32BE(offset);
    const type = png.toString("latin1", offset + 4, offset + 8);
    if (type === "tEXt") {
      const data = png.subarray(offset + 8, offset + 8 + length);
      const sep = data.indexOf(0);
      out[data.toString("latin1", 0, sep)] = data.toString("latin1", sep + 1);
    }
    offset += length + 12;
    if (type === "IEND") break;
  }
  return out;
}

export function readPngSize(png: Buffer): { width: number; height: number } {
  return { width: png.readUInt32BE(16), height: png.readUInt32BE(20) };
}
