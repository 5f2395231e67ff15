/**
 * Minimal SVG document builder with an embedded metadata block.
 */

import { METADATA_KEY, asciiJson, type ChartMetadata } from "./metadata.js";

export function xmlEscape(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function xmlUnescape(text: string): string {
  return text
    .replace(/&quot;/g, '"')
    .replace(/&gt;/g, ">")
    .replace(/&lt;/g, "<")
    .replace(/&amp;/g, "&");
}

export class SvgDoc {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {}

  raw(fragment: string): void {
    this.parts.push(fragment);
  }

  rect(x: number, y: number, w: number, h: number, attrs: string): void {
    this.raw(`<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" ${attrs}/>`);
  }

  line(x1: number, y1: number, x2: number, y2: number, attrs: string): void {
    this.raw(`<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ${attrs}/>`);
  }

  polyline(points: Array<[number, number]>, attrs: string): void {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.raw(`<polyline points="${pts}" fill="none" ${attrs}/>`);
  }

  circle(cx: number, cy: number, r: number, attrs: string): void {
    this.raw(`<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${fmt(r)}" ${attrs}/>`);
  }

  diamond(cx: number, cy: number, r: number, attrs: string): void {
    const pts = [
      [cx, cy - r],
      [cx + r, cy],
      [cx, cy + r],
      [cx - r, cy],
    ]
      .map(([x, y]) => `${fmt(x)},${fmt(y)}`)
      .join(" ");
    this.raw(`<polygon points="${pts}" ${attrs}/>`);
  }

  text(x: number, y: number, content: string, attrs: string): void {
    this.raw(`<text x="${fmt(x)}" y="${fmt(y)}" ${attrs}>${xmlEscape(content)}</text>`);
  }

  render(metadata: ChartMetadata): string {
    const header =
      `<?xml version="1.0" encoding="UTF-8"?>\n` +
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
      `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}" ` +
      `font-family="Helvetica, Arial, sans-serif">\n`;
    const meta =
      `<metadata id="${METADATA_KEY}">` +
      xmlEscape(asciiJson(metadata)) +
      `</metadata>\n`;
    return header + meta + this.parts.join("\n") + "\n</svg>\n";
  }
}

function fmt(v: number): string {
  return Number.isInteger(v) ? String(v) : v.toFixed(2);
}

export function extractSvgMetadata(svgText: string): ChartMetadata {
  const match = svgText.match(
    new RegExp(`<metadata id="${METADATA_KEY}">([\\s\\S]*?)</metadata>`),
  );
  if (!match) {
    throw new Error(`no <metadata id="${METADATA_KEY}"> block found`);
  }
  return JSON.parse(xmlUnescape(match[1])) as ChartMetadata;
}
