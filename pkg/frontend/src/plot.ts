/**
 * Layout math shared by the SVG and PNG renderers: linear scales, tick
 * placement, color palettes, and the isometric projection for orbit views.
 */

export const SERIES_COLORS = [
  "#1f77b4",
  "#ff7f0e",
  "#9467bd",
  "#8c564b",
  "#17becf",
  "#bcbd22",
];

export const LABEL_COLORS: Record<string, string> = {
  u1: "#d62728",
  u2: "#2ca02c",
  undecided: "#7f7f7f",
};

export function seriesColor(i: number): string {
  return SERIES_COLORS[i % SERIES_COLORS.length];
}

export interface Scale {
  (v: number): number;
  domain: [number, number];
}

export function padDomain(lo: number, hi: number, frac = 0.05): [number, number] {
  if (!(hi > lo)) {
    const pad = Math.abs(lo) > 0 ? Math.abs(lo) * 0.5 : 1;
    return [lo - pad, lo + pad];
  }
  const pad = (hi - lo) * frac;
  return [lo - pad, hi + pad];
}

export function linearScale(
  [d0, d1]: [number, number],
  [r0, r1]: [number, number],
): Scale {
  const span = d1 - d0 || 1;
  const fn = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  fn.domain = [d0, d1];
  return fn;
}

/** Round-valued tick positions covering [lo, hi], about `count` of them. */
export function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) {
    return [lo];
  }
  const rawStep = (hi - lo) / Math.max(1, count - 1);
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const norm = rawStep / mag;
  const step = (norm >= 7.5 ? 10 : norm >= 3.5 ? 5 : norm >= 1.5 ? 2 : 1) * mag;
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

export function tickLabel(v: number): string {
  if (v === 0) {
    return "0";
  }
  const a = Math.abs(v);
  if (a >= 1e5 || a < 1e-3) {
    return v.toExponential(1);
  }
  return String(Number(v.toPrecision(6)));
}

/**
 * Isometric projection of a unit-box point onto the plane, y-up.
 * Inputs are expected normalized to [0, 1] per axis.
 */
export function isoProject(x: number, y: number, z: number): [number, number] {
  const c30 = Math.cos(Math.PI / 6);
  const s30 = Math.sin(Math.PI / 6);
  return [(x - y) * c30, (x + y) * s30 - z];
}
