/**
 * Dependency-free raster canvas and PNG writer.
 *
 * The encoder emits 8-bit RGBA with filter 0 scanlines and one tEXt chunk
 * per metadata entry; `extractPngTexts` walks the chunk stream back out, so
 * embedded tables survive a write/read round trip untouched.
 */

import { deflateSync, inflateSync } from "node:zlib";

const SIGNATURE = Uint8Array.from([137, 80, 78, 71, 13, 10, 26, 10]);

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

function crc32(...buffers: Uint8Array[]): number {
  let c = 0xffffffff;
  for (const buf of buffers) {
    for (let i = 0; i < buf.length; i++) {
      c = CRC_TABLE[(c ^ buf[i]) & 0xff] ^ (c >>> 8);
    }
  }
  return (c ^ 0xffffffff) >>> 0;
}

export type Rgba = [number, number, number, number];

export function hexColor(hex: string, alpha = 255): Rgba {
  const m = hex.match(/^#([0-9a-f]{6})$/i);
  if (!m) {
    throw new Error(`bad color ${hex}`);
  }
  const v = parseInt(m[1], 16);
  return [(v >> 16) & 0xff, (v >> 8) & 0xff, v & 0xff, alpha];
}

export class Raster {
  readonly data: Uint8Array;

  constructor(readonly width: number, readonly height: number, fill: Rgba = [255, 255, 255, 255]) {
    this.data = new Uint8Array(width * height * 4);
    for (let i = 0; i < width * height; i++) {
      this.data.set(fill, i * 4);
    }
  }

  set(x: number, y: number, color: Rgba): void {
    x = Math.round(x);
    y = Math.round(y);
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) {
      return;
    }
    this.data.set(color, (y * this.width + x) * 4);
  }

  fillRect(x: number, y: number, w: number, h: number, color: Rgba): void {
    for (let j = Math.max(0, Math.round(y)); j < Math.min(this.height, Math.round(y + h)); j++) {
      for (let i = Math.max(0, Math.round(x)); i < Math.min(this.width, Math.round(x + w)); i++) {
        this.data.set(color, (j * this.width + i) * 4);
      }
    }
  }

  line(x1: number, y1: number, x2: number, y2: number, color: Rgba): void {
    // Bresenham on rounded endpoints
    let x = Math.round(x1);
    let y = Math.round(y1);
    const xe = Math.round(x2);
    const ye = Math.round(y2);
    const dx = Math.abs(xe - x);
    const dy = -Math.abs(ye - y);
    const sx = x < xe ? 1 : -1;
    const sy = y < ye ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      this.set(x, y, color);
      if (x === xe && y === ye) {
        break;
      }
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y += sy;
      }
    }
  }

  dashedLine(x1: number, y1: number, x2: number, y2: number, color: Rgba, dash = 4): void {
    const len = Math.hypot(x2 - x1, y2 - y1);
    const segments = Math.max(1, Math.floor(len / dash));
    for (let s = 0; s < segments; s += 2) {
      const t0 = s / segments;
      const t1 = Math.min(1, (s + 1) / segments);
      this.line(
        x1 + (x2 - x1) * t0,
        y1 + (y2 - y1) * t0,
        x1 + (x2 - x1) * t1,
        y1 + (y2 - y1) * t1,
        color,
      );
    }
  }

  disc(cx: number, cy: number, r: number, color: Rgba): void {
    for (let y = -r; y <= r; y++) {
      for (let x = -r; x <= r; x++) {
        if (x * x + y * y <= r * r) {
          this.set(cx + x, cy + y, color);
        }
      }
    }
  }

  diamond(cx: number, cy: number, r: number, color: Rgba): void {
    for (let y = -r; y <= r; y++) {
      for (let x = -r; x <= r; x++) {
        if (Math.abs(x) + Math.abs(y) <= r) {
          this.set(cx + x, cy + y, color);
        }
      }
    }
  }
}

function chunk(type: string, payload: Uint8Array): Uint8Array {
  const typeBytes = new TextEncoder().encode(type);
  const out = new Uint8Array(12 + payload.length);
  const view = new DataView(out.buffer);
  view.setUint32(0, payload.length);
  out.set(typeBytes, 4);
  out.set(payload, 8);
  view.setUint32(8 + payload.length, crc32(typeBytes, payload));
  return out;
}

function latin1(text: string): Uint8Array {
  const out = new Uint8Array(text.length);
  for (let i = 0; i < text.length; i++) {
    const code = text.charCodeAt(i);
    if (code > 255) {
      throw new Error(`tEXt payload is not Latin-1 (code ${code})`);
    }
    out[i] = code;
  }
  return out;
}

export function encodePng(raster: Raster, texts: Record<string, string> = {}): Uint8Array {
  const { width, height, data } = raster;
  const ihdr = new Uint8Array(13);
  const ihdrView = new DataView(ihdr.buffer);
  ihdrView.setUint32(0, width);
  ihdrView.setUint32(4, height);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 6; // RGBA
  const stride = width * 4;
  const filtered = new Uint8Array(height * (stride + 1));
  for (let y = 0; y < height; y++) {
    filtered[y * (stride + 1)] = 0; // filter type 0
    filtered.set(data.subarray(y * stride, (y + 1) * stride), y * (stride + 1) + 1);
  }
  const pieces = [SIGNATURE, chunk("IHDR", ihdr)];
  for (const [keyword, text] of Object.entries(texts)) {
    if (keyword.length === 0 || keyword.length > 79) {
      throw new Error(`tEXt keyword length must be 1..79: ${keyword}`);
    }
    pieces.push(chunk("tEXt", latin1(`${keyword}\0${text}`)));
  }
  pieces.push(chunk("IDAT", deflateSync(filtered)));
  pieces.push(chunk("IEND", new Uint8Array(0)));
  const total = pieces.reduce((n, p) => n + p.length, 0);
  const out = new Uint8Array(total);
  let offset = 0;
  for (const piece of pieces) {
    out.set(piece, offset);
    offset += piece.length;
  }
  return out;
}

export interface PngChunk {
  type: string;
  payload: Uint8Array;
}

export function walkChunks(png: Uint8Array): PngChunk[] {
  for (let i = 0; i < SIGNATURE.length; i++) {
    if (png[i] !== SIGNATURE[i]) {
      throw new Error("not a PNG file (bad signature)");
    }
  }
  const chunks: PngChunk[] = [];
  const view = new DataView(png.buffer, png.byteOffset, png.byteLength);
  let offset = 8;
  while (offset < png.length) {
    const length = view.getUint32(offset);
    const type = String.fromCharCode(...png.subarray(offset + 4, offset + 8));
    const payload = png.subarray(offset + 8, offset + 8 + length);
    const stored = view.getUint32(offset + 8 + length);
    if (stored !== crc32(png.subarray(offset + 4, offset + 8), payload)) {
      throw new Error(`bad CRC in ${type} chunk`);
    }
    chunks.push({ type, payload });
    offset += 12 + length;
    if (type === "IEND") {
      break;
    }
  }
  return chunks;
}

export function extractPngTexts(png: Uint8Array): Record<string, string> {
  const texts: Record<string, string> = {};
  for (const { type, payload } of walkChunks(png)) {
    if (type !== "tEXt") {
      continue;
    }
    const sep = payload.indexOf(0);
    const decode = (bytes: Uint8Array) =>
      Array.from(bytes, (b) => String.fromCharCode(b)).join("");
    texts[decode(payload.subarray(0, sep))] = decode(payload.subarray(sep + 1));
  }
  return texts;
}

/** Decode the RGBA pixels back out (filter 0 only, as written by encodePng). */
export function decodePixels(png: Uint8Array): { width: number; height: number; data: Uint8Array } {
  const chunks = walkChunks(png);
  const ihdr = chunks.find((c) => c.type === "IHDR");
  if (!ihdr) {
    throw new Error("missing IHDR");
  }
  const view = new DataView(ihdr.payload.buffer, ihdr.payload.byteOffset);
  const width = view.getUint32(0);
  const height = view.getUint32(4);
  const idat = Buffer.concat(
    chunks.filter((c) => c.type === "IDAT").map((c) => Buffer.from(c.payload)),
  );
  const filtered = inflateSync(idat);
  const stride = width * 4;
  const data = new Uint8Array(width * height * 4);
  for (let y = 0; y < height; y++) {
    if (filtered[y * (stride + 1)] !== 0) {
      throw new Error("unsupported scanline filter");
    }
    data.set(
      filtered.subarray(y * (stride + 1) + 1, (y + 1) * (stride + 1)),
      y * stride,
    );
  }
  return { width, height, data };
}
