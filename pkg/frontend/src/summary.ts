/**
 * Reader for the simulator's run-summary JSON (the `repro` subcommand's
 * `<which>_summary.json`).  Only the fixed-point list is required here;
 * everything else is passed through untouched.
 */

import { readFileSync } from "node:fs";

export interface FixedPointMarker {
  label: string;
  location: [number, number, number];
  biological_label?: string;
  stability?: string;
}

export interface RunSummary {
  which?: string;
  params?: Record<string, number>;
  fixed_points: FixedPointMarker[];
  ok?: boolean;
}

export class SummaryFormatError extends Error {}

export function loadSummary(path: string): RunSummary {
  let parsed: unknown;
  try {
    parsed = JSON.parse(readFileSync(path, "utf-8"));
  } catch (err) {
    throw new SummaryFormatError(`${path}: ${(err as Error).message}`);
  }
  if (typeof parsed !== "object" || parsed === null) {
    throw new SummaryFormatError(`${path}: summary must be a JSON object`);
  }
  const summary = parsed as Record<string, unknown>;
  const fps = summary.fixed_points;
  if (!Array.isArray(fps)) {
    throw new SummaryFormatError(`${path}: missing fixed_points array`);
  }
  for (const fp of fps) {
    const rec = fp as Record<string, unknown>;
    if (typeof rec.label !== "string" || !Array.isArray(rec.location) ||
        rec.location.length !== 3 ||
        rec.location.some((v) => typeof v !== "number")) {
      throw new SummaryFormatError(
        `${path}: fixed_points entries need a label and a 3-number location`,
      );
    }
  }
  return parsed as unknown as RunSummary;
}
