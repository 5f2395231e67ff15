/**
 * Figure rendering: trajectory time-series / orbit views and basin slices.
 *
 * The geometry is built once into a small scene-graph and emitted either as
 * SVG (fully annotated) or PNG via the built-in rasterizer (curves, markers
 * and swatches; the text layer lives in the embedded metadata).  Every
 * image embeds its source tables verbatim for the integrity mode.
 */

import { readFileSync, writeFileSync } from "node:fs";

import {
  parseBasinCsv,
  parseTrajectoryCsv,
  tableName,
  type BasinTable,
  type TrajectoryTable,
} from "./csv.js";
import {
  METADATA_KEY,
  asciiJson,
  equalsModuloTrailingWs,
  type ChartMetadata,
  type MarkerEntry,
} from "./metadata.js";
import { Raster, encodePng, extractPngTexts, hexColor } from "./png.js";
import {
  LABEL_COLORS,
  isoProject,
  linearScale,
  niceTicks,
  padDomain,
  seriesColor,
  tickLabel,
  type Scale,
} from "./plot.js";
import { SvgDoc, extractSvgMetadata } from "./svg.js";
import { loadSummary, type FixedPointMarker } from "./summary.js";

export type ImageFormat = "svg" | "png";

export class SliceError extends Error {}

export interface TrajectoryRenderOptions {
  inputs: string[];
  summaryPath: string;
  outPath: string;
  layout?: "series" | "orbit3d";
}

export interface BasinRenderOptions {
  input: string;
  summaryPath: string;
  outPath: string;
  slice: { axis: "x" | "y" | "z"; value: number };
}

export interface RenderResult {
  outPath: string;
  format: ImageFormat;
  metadata: ChartMetadata;
}

export function formatFromPath(path: string): ImageFormat {
  if (/\.svg$/i.test(path)) {
    return "svg";
  }
  if (/\.png$/i.test(path)) {
    return "png";
  }
  throw new Error(`output must end in .svg or .png: ${path}`);
}

// ---------------------------------------------------------------------------
// Scene graph

type SceneItem =
  | { kind: "rect"; x: number; y: number; w: number; h: number; fill?: string; stroke?: string }
  | { kind: "line"; x1: number; y1: number; x2: number; y2: number; color: string; dashed?: boolean }
  | { kind: "polyline"; pts: Array<[number, number]>; color: string }
  | { kind: "circle"; cx: number; cy: number; r: number; color: string }
  | { kind: "diamond"; cx: number; cy: number; r: number; color: string }
  | { kind: "text"; x: number; y: number; text: string; size?: number; color?: string; anchor?: "start" | "middle" | "end" };

interface Scene {
  width: number;
  height: number;
  items: SceneItem[];
}

function sceneToSvg(scene: Scene, metadata: ChartMetadata): string {
  const doc = new SvgDoc(scene.width, scene.height);
  doc.rect(0, 0, scene.width, scene.height, 'fill="#ffffff"');
  for (const item of scene.items) {
    switch (item.kind) {
      case "rect": {
        const fill = item.fill ? `fill="${item.fill}"` : 'fill="none"';
        const stroke = item.stroke ? ` stroke="${item.stroke}"` : "";
        doc.rect(item.x, item.y, item.w, item.h, `${fill}${stroke}`);
        break;
      }
      case "line": {
        const dash = item.dashed ? ' stroke-dasharray="5,4"' : "";
        doc.line(item.x1, item.y1, item.x2, item.y2,
          `stroke="${item.color}"${dash}`);
        break;
      }
      case "polyline":
        doc.polyline(item.pts, `stroke="${item.color}" stroke-width="1.2"`);
        break;
      case "circle":
        doc.circle(item.cx, item.cy, item.r, `fill="${item.color}"`);
        break;
      case "diamond":
        doc.diamond(item.cx, item.cy, item.r, `fill="${item.color}"`);
        break;
      case "text": {
        const anchor = item.anchor ?? "start";
        doc.text(item.x, item.y, item.text,
          `font-size="${item.size ?? 12}" fill="${item.color ?? "#222222"}" text-anchor="${anchor}"`);
        break;
      }
    }
  }
  return doc.render(metadata);
}

function sceneToRaster(scene: Scene): Raster {
  const raster = new Raster(scene.width, scene.height);
  for (const item of scene.items) {
    switch (item.kind) {
      case "rect":
        if (item.fill) {
          raster.fillRect(item.x, item.y, item.w, item.h, hexColor(item.fill));
        }
        if (item.stroke) {
          const c = hexColor(item.stroke);
          raster.line(item.x, item.y, item.x + item.w, item.y, c);
          raster.line(item.x + item.w, item.y, item.x + item.w, item.y + item.h, c);
          raster.line(item.x + item.w, item.y + item.h, item.x, item.y + item.h, c);
          raster.line(item.x, item.y + item.h, item.x, item.y, c);
        }
        break;
      case "line": {
        const c = hexColor(item.color);
        if (item.dashed) {
          raster.dashedLine(item.x1, item.y1, item.x2, item.y2, c);
        } else {
          raster.line(item.x1, item.y1, item.x2, item.y2, c);
        }
        break;
      }
      case "polyline": {
        const c = hexColor(item.color);
        for (let i = 1; i < item.pts.length; i++) {
          raster.line(item.pts[i - 1][0], item.pts[i - 1][1],
            item.pts[i][0], item.pts[i][1], c);
        }
        if (item.pts.length === 1) {
          raster.set(item.pts[0][0], item.pts[0][1], c);
        }
        break;
      }
      case "circle":
        raster.disc(Math.round(item.cx), Math.round(item.cy),
          Math.round(item.r), hexColor(item.color));
        break;
      case "diamond":
        raster.diamond(Math.round(item.cx), Math.round(item.cy),
          Math.round(item.r), hexColor(item.color));
        break;
      case "text":
        break; // raster output carries labels in metadata only
    }
  }
  return raster;
}

// ---------------------------------------------------------------------------
// Trajectory figures

const COMPONENTS = [
  { key: "x" as const, label: "glucose x (mg/dl)" },
  { key: "y" as const, label: "insulin y (µU/ml)" },
  { key: "z" as const, label: "beta-cell mass z (mg)" },
];

const FRAME = "#444444";
const GRID = "#dddddd";

function markerColor(label: string): string {
  return LABEL_COLORS[label] ?? "#555555";
}

function shortNum(v: number): string {
  return String(Number(v.toPrecision(5)));
}

function legendItems(scene: Scene, x: number, y0: number,
                     tables: Array<{ name: string }>,
                     markers: MarkerEntry[]): void {
  let y = y0;
  scene.items.push({ kind: "text", x, y, text: "orbits", size: 12 });
  y += 8;
  tables.forEach((t, i) => {
    y += 18;
    scene.items.push({ kind: "line", x1: x, y1: y - 4, x2: x + 22, y2: y - 4,
      color: seriesColor(i) });
    scene.items.push({ kind: "circle", cx: x + 4, cy: y - 4, r: 3,
      color: seriesColor(i) });
    scene.items.push({ kind: "text", x: x + 30, y, text: t.name, size: 12 });
  });
  y += 28;
  scene.items.push({ kind: "text", x, y, text: "fixed points", size: 12 });
  y += 8;
  for (const m of markers) {
    y += 18;
    scene.items.push({ kind: "diamond", cx: x + 11, cy: y - 4, r: 5,
      color: markerColor(m.label) });
    const loc = `(${m.location.map(shortNum).join(", ")})`;
    scene.items.push({ kind: "text", x: x + 30, y, text: `${m.label} ${loc}`,
      size: 12 });
  }
}

function buildSeriesScene(tables: TrajectoryTable[],
                          markers: MarkerEntry[]): Scene {
  const LEFT = 70;
  const RIGHT = 230;
  const TOP = 34;
  const BOTTOM = 48;
  const PANEL_H = 170;
  const GAP = 34;
  const width = 960;
  const height = TOP + 3 * PANEL_H + 2 * GAP + BOTTOM;
  const plotW = width - LEFT - RIGHT;
  const scene: Scene = { width, height, items: [] };

  const nLo = Math.min(...tables.map((t) => t.n[0]));
  const nHi = Math.max(...tables.map((t) => t.n[t.n.length - 1]));
  const sx = linearScale(padDomain(nLo, nHi, 0.02), [LEFT, LEFT + plotW]);

  COMPONENTS.forEach((comp, ci) => {
    const top = TOP + ci * (PANEL_H + GAP);
    const values: number[] = [];
    for (const t of tables) {
      values.push(...t[comp.key]);
    }
    for (const m of markers) {
      values.push(m.location[ci]);
    }
    const dom = padDomain(Math.min(...values), Math.max(...values));
    const sy = linearScale(dom, [top + PANEL_H, top]);

    for (const tick of niceTicks(dom[0], dom[1])) {
      const py = sy(tick);
      scene.items.push({ kind: "line", x1: LEFT, y1: py, x2: LEFT + plotW,
        y2: py, color: GRID });
      scene.items.push({ kind: "text", x: LEFT - 8, y: py + 4,
        text: tickLabel(tick), size: 11, anchor: "end" });
    }
    if (ci === COMPONENTS.length - 1) {
      for (const tick of niceTicks(sx.domain[0], sx.domain[1], 6)) {
        const px = sx(tick);
        scene.items.push({ kind: "line", x1: px, y1: top + PANEL_H,
          x2: px, y2: top + PANEL_H + 5, color: FRAME });
        scene.items.push({ kind: "text", x: px, y: top + PANEL_H + 18,
          text: tickLabel(tick), size: 11, anchor: "middle" });
      }
      scene.items.push({ kind: "text", x: LEFT + plotW / 2,
        y: top + PANEL_H + 36, text: "iteration n", size: 12,
        anchor: "middle" });
    }

    for (const m of markers) {
      const py = sy(m.location[ci]);
      scene.items.push({ kind: "line", x1: LEFT, y1: py, x2: LEFT + plotW,
        y2: py, color: markerColor(m.label), dashed: true });
      scene.items.push({ kind: "diamond", cx: LEFT + plotW, cy: py, r: 5,
        color: markerColor(m.label) });
    }

    tables.forEach((t, ti) => {
      const pts: Array<[number, number]> = t.n.map((n, j) =>
        [sx(n), sy(t[comp.key][j])]);
      scene.items.push({ kind: "polyline", pts, color: seriesColor(ti) });
      scene.items.push({ kind: "circle", cx: pts[0][0], cy: pts[0][1], r: 4,
        color: seriesColor(ti) });
    });

    scene.items.push({ kind: "rect", x: LEFT, y: top, w: plotW, h: PANEL_H,
      stroke: FRAME });
    scene.items.push({ kind: "text", x: LEFT, y: top - 8, text: comp.label,
      size: 12 });
  });

  legendItems(scene, width - RIGHT + 28, TOP + 6, tables, markers);
  return scene;
}

function buildOrbitScene(tables: TrajectoryTable[],
                         markers: MarkerEntry[]): Scene {
  const width = 780;
  const height = 620;
  const RIGHT = 230;
  const scene: Scene = { width, height, items: [] };

  const mins = [Infinity, Infinity, Infinity];
  const maxs = [-Infinity, -Infinity, -Infinity];
  const collect = (x: number, y: number, z: number) => {
    const v = [x, y, z];
    for (let i = 0; i < 3; i++) {
      mins[i] = Math.min(mins[i], v[i]);
      maxs[i] = Math.max(maxs[i], v[i]);
    }
  };
  for (const t of tables) {
    for (let j = 0; j < t.n.length; j++) {
      collect(t.x[j], t.y[j], t.z[j]);
    }
  }
  for (const m of markers) {
    collect(m.location[0], m.location[1], m.location[2]);
  }
  const norms = [0, 1, 2].map((i) => {
    const [lo, hi] = padDomain(mins[i], maxs[i]);
    return (v: number) => (v - lo) / (hi - lo);
  });
  const project = (x: number, y: number, z: number): [number, number] =>
    isoProject(norms[0](x), norms[1](y), norms[2](z));

  // viewport fit over the projected unit box
  const corners: Array<[number, number]> = [];
  for (const cx of [0, 1]) {
    for (const cy of [0, 1]) {
      for (const cz of [0, 1]) {
        corners.push(isoProject(cx, cy, cz));
      }
    }
  }
  const uLo = Math.min(...corners.map((c) => c[0]));
  const uHi = Math.max(...corners.map((c) => c[0]));
  const vLo = Math.min(...corners.map((c) => c[1]));
  const vHi = Math.max(...corners.map((c) => c[1]));
  const su = linearScale([uLo, uHi], [50, width - RIGHT - 20]);
  const sv = linearScale([vLo, vHi], [height - 60, 40]);
  const toPx = (p: [number, number]): [number, number] => [su(p[0]), sv(p[1])];

  // axis edges from the origin corner, labeled at their tips
  const axes: Array<{ tip: [number, number, number]; label: string }> = [
    { tip: [1, 0, 0], label: "x" },
    { tip: [0, 1, 0], label: "y" },
    { tip: [0, 0, 1], label: "z" },
  ];
  const o = toPx(isoProject(0, 0, 0));
  for (const ax of axes) {
    const tip = toPx(isoProject(...ax.tip));
    scene.items.push({ kind: "line", x1: o[0], y1: o[1], x2: tip[0],
      y2: tip[1], color: "#999999" });
    scene.items.push({ kind: "text", x: tip[0] + 6, y: tip[1], text: ax.label,
      size: 12, color: "#666666" });
  }

  tables.forEach((t, ti) => {
    const pts: Array<[number, number]> = t.n.map((_, j) =>
      toPx(project(t.x[j], t.y[j], t.z[j])));
    scene.items.push({ kind: "polyline", pts, color: seriesColor(ti) });
    scene.items.push({ kind: "circle", cx: pts[0][0], cy: pts[0][1], r: 4,
      color: seriesColor(ti) });
  });
  for (const m of markers) {
    const p = toPx(project(m.location[0], m.location[1], m.location[2]));
    scene.items.push({ kind: "diamond", cx: p[0], cy: p[1], r: 6,
      color: markerColor(m.label) });
  }

  legendItems(scene, width - RIGHT + 28, 40, tables, markers);
  return scene;
}

// ---------------------------------------------------------------------------
// Basin figures

const BASIN_AXES: Record<"x" | "y" | "z", { col: "x0" | "y0" | "z0"; h: "x0" | "y0" | "z0"; v: "x0" | "y0" | "z0"; hName: string; vName: string }> = {
  x: { col: "x0", h: "y0", v: "z0", hName: "y0", vName: "z0" },
  y: { col: "y0", h: "x0", v: "z0", hName: "x0", vName: "z0" },
  z: { col: "z0", h: "x0", v: "y0", hName: "x0", vName: "y0" },
};

function minGap(sorted: number[]): number {
  let gap = Infinity;
  for (let i = 1; i < sorted.length; i++) {
    gap = Math.min(gap, sorted[i] - sorted[i - 1]);
  }
  return gap;
}

function buildBasinScene(table: BasinTable,
                         slice: { axis: "x" | "y" | "z"; value: number },
                         markers: MarkerEntry[]): Scene {
  const axes = BASIN_AXES[slice.axis];
  const keep: number[] = [];
  for (let i = 0; i < table.label.length; i++) {
    if (table[axes.col][i] === slice.value) {
      keep.push(i);
    }
  }
  if (keep.length === 0) {
    const planes = [...new Set(table[axes.col])].sort((a, b) => a - b);
    throw new SliceError(
      `slice ${slice.axis}=${slice.value} matches no grid plane; available: ` +
      planes.slice(0, 10).join(", ") + (planes.length > 10 ? ", ..." : ""));
  }

  const width = 760;
  const height = 560;
  const LEFT = 70;
  const RIGHT = 210;
  const TOP = 46;
  const BOTTOM = 60;
  const plotW = width - LEFT - RIGHT;
  const plotH = height - TOP - BOTTOM;
  const scene: Scene = { width, height, items: [] };

  const hs = keep.map((i) => table[axes.h][i]);
  const vs = keep.map((i) => table[axes.v][i]);
  const hUnique = [...new Set(hs)].sort((a, b) => a - b);
  const vUnique = [...new Set(vs)].sort((a, b) => a - b);
  const hDom = padDomain(hUnique[0], hUnique[hUnique.length - 1], 0.08);
  const vDom = padDomain(vUnique[0], vUnique[vUnique.length - 1], 0.08);
  const sx = linearScale(hDom, [LEFT, LEFT + plotW]);
  const sy = linearScale(vDom, [TOP + plotH, TOP]);
  const hGap = hUnique.length > 1 ? minGap(hUnique) : (hDom[1] - hDom[0]);
  const vGap = vUnique.length > 1 ? minGap(vUnique) : (vDom[1] - vDom[0]);
  const cw = Math.max(3, Math.abs(sx(hGap) - sx(0)) * 0.9);
  const ch = Math.max(3, Math.abs(sy(0) - sy(vGap)) * 0.9);

  for (const tick of niceTicks(hDom[0], hDom[1], 6)) {
    scene.items.push({ kind: "line", x1: sx(tick), y1: TOP + plotH,
      x2: sx(tick), y2: TOP + plotH + 5, color: FRAME });
    scene.items.push({ kind: "text", x: sx(tick), y: TOP + plotH + 18,
      text: tickLabel(tick), size: 11, anchor: "middle" });
  }
  for (const tick of niceTicks(vDom[0], vDom[1], 6)) {
    scene.items.push({ kind: "line", x1: LEFT - 5, y1: sy(tick), x2: LEFT,
      y2: sy(tick), color: FRAME });
    scene.items.push({ kind: "text", x: LEFT - 9, y: sy(tick) + 4,
      text: tickLabel(tick), size: 11, anchor: "end" });
  }

  keep.forEach((i) => {
    scene.items.push({
      kind: "rect",
      x: sx(table[axes.h][i]) - cw / 2,
      y: sy(table[axes.v][i]) - ch / 2,
      w: cw,
      h: ch,
      fill: LABEL_COLORS[table.label[i]],
    });
  });

  for (const m of markers) {
    const locByAxis: Record<string, number> = {
      x0: m.location[0], y0: m.location[1], z0: m.location[2],
    };
    scene.items.push({ kind: "diamond", cx: sx(locByAxis[axes.h]),
      cy: sy(locByAxis[axes.v]), r: 6, color: "#000000" });
    scene.items.push({ kind: "diamond", cx: sx(locByAxis[axes.h]),
      cy: sy(locByAxis[axes.v]), r: 4, color: markerColor(m.label) });
  }

  scene.items.push({ kind: "rect", x: LEFT, y: TOP, w: plotW, h: plotH,
    stroke: FRAME });
  scene.items.push({ kind: "text", x: LEFT, y: TOP - 16,
    text: `basin slice ${slice.axis} = ${slice.value} ` +
          `(${keep.length} of ${table.label.length} points)`, size: 13 });
  scene.items.push({ kind: "text", x: LEFT + plotW / 2, y: TOP + plotH + 40,
    text: axes.hName, size: 12, anchor: "middle" });
  scene.items.push({ kind: "text", x: LEFT - 40, y: TOP - 4,
    text: axes.vName, size: 12 });

  // color key
  let y = TOP + 6;
  const lx = width - RIGHT + 28;
  scene.items.push({ kind: "text", x: lx, y, text: "labels", size: 12 });
  y += 8;
  for (const label of ["u1", "u2", "undecided"]) {
    y += 18;
    scene.items.push({ kind: "rect", x: lx, y: y - 12, w: 14, h: 12,
      fill: LABEL_COLORS[label] });
    scene.items.push({ kind: "text", x: lx + 22, y: y - 2, text: label,
      size: 12 });
  }
  y += 28;
  scene.items.push({ kind: "text", x: lx, y, text: "fixed points", size: 12 });
  y += 8;
  for (const m of markers) {
    y += 18;
    scene.items.push({ kind: "diamond", cx: lx + 7, cy: y - 6, r: 5,
      color: markerColor(m.label) });
    scene.items.push({ kind: "text", x: lx + 22, y, text: m.label, size: 12 });
  }
  return scene;
}

// ---------------------------------------------------------------------------
// Entry points

function markerEntries(fps: FixedPointMarker[]): MarkerEntry[] {
  return fps.map((fp) => ({
    label: fp.label,
    location: [...fp.location],
    ...(fp.biological_label ? { biological_label: fp.biological_label } : {}),
  }));
}

function emit(scene: Scene, metadata: ChartMetadata, outPath: string,
              format: ImageFormat): RenderResult {
  if (format === "svg") {
    writeFileSync(outPath, sceneToSvg(scene, metadata), "utf-8");
  } else {
    const png = encodePng(sceneToRaster(scene),
      { [METADATA_KEY]: asciiJson(metadata) });
    writeFileSync(outPath, Buffer.from(png));
  }
  return { outPath, format, metadata };
}

export function renderTrajectories(opts: TrajectoryRenderOptions): RenderResult {
  if (opts.inputs.length === 0) {
    throw new Error("at least one trajectory CSV is required");
  }
  const format = formatFromPath(opts.outPath);
  const tables = opts.inputs.map((p) =>
    parseTrajectoryCsv(readFileSync(p, "utf-8"), p));
  const markers = markerEntries(loadSummary(opts.summaryPath).fixed_points);
  const scene = opts.layout === "orbit3d"
    ? buildOrbitScene(tables, markers)
    : buildSeriesScene(tables, markers);
  const metadata: ChartMetadata = {
    generator: "toppmap-render",
    kind: "trajectory",
    legend: {
      series: tables.map((t) => t.name),
      markers,
    },
    data: Object.fromEntries(tables.map((t) => [t.name, t.raw])),
  };
  return emit(scene, metadata, opts.outPath, format);
}

export function renderBasins(opts: BasinRenderOptions): RenderResult {
  const format = formatFromPath(opts.outPath);
  const table = parseBasinCsv(readFileSync(opts.input, "utf-8"), opts.input);
  const markers = markerEntries(loadSummary(opts.summaryPath).fixed_points);
  const scene = buildBasinScene(table, opts.slice, markers);
  const metadata: ChartMetadata = {
    generator: "toppmap-render",
    kind: "basin",
    legend: {
      series: [table.name],
      markers,
    },
    slice: { ...opts.slice },
    data: { [table.name]: table.raw },
  };
  return emit(scene, metadata, opts.outPath, format);
}

// ---------------------------------------------------------------------------
// Integrity mode

export function extractMetadataFromFile(path: string): ChartMetadata {
  const buf = readFileSync(path);
  if (buf.length >= 8 && buf[0] === 0x89 && buf[1] === 0x50) {
    const texts = extractPngTexts(new Uint8Array(buf));
    const raw = texts[METADATA_KEY];
    if (raw === undefined) {
      throw new Error(`${path}: no ${METADATA_KEY} text chunk`);
    }
    return JSON.parse(raw) as ChartMetadata;
  }
  return extractSvgMetadata(buf.toString("utf-8"));
}

export interface IntegrityEntry {
  name: string;
  path: string;
  ok: boolean;
  reason?: string;
}

/**
 * Compare the tables embedded in a rendered image against the input files,
 * byte for byte modulo trailing whitespace.
 */
export function verifyEmbeddedData(imagePath: string,
                                   inputPaths: string[]): IntegrityEntry[] {
  const metadata = extractMetadataFromFile(imagePath);
  return inputPaths.map((path) => {
    const name = tableName(path);
    const embedded = metadata.data[name];
    if (embedded === undefined) {
      return { name, path, ok: false, reason: "not embedded" };
    }
    const ok = equalsModuloTrailingWs(embedded, readFileSync(path, "utf-8"));
    return ok ? { name, path, ok } : { name, path, ok, reason: "content differs" };
  });
}
