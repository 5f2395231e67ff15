/**
 * Strict parsers for the simulator's CSV contracts.
 *
 * Trajectory files: header `n,x,y,z,in_omega,in_omega1,in_omega2`.
 * Basin files: header `x0,y0,z0,label,iterations,x_hyp,z_hyp`.
 * Any header mismatch or an empty table is an error; rows are kept in file
 * order and never re-sorted.
 */

import { basename } from "node:path";

export const TRAJECTORY_HEADER = "n,x,y,z,in_omega,in_omega1,in_omega2";
export const BASIN_HEADER = "x0,y0,z0,label,iterations,x_hyp,z_hyp";

export type BasinLabel = "u1" | "u2" | "undecided";

export interface TrajectoryTable {
  /** Legend name: file basename without the .csv suffix. */
  name: string;
  /** Raw file text, byte-preserved for embedding. */
  raw: string;
  n: number[];
  x: number[];
  y: number[];
  z: number[];
  inOmega: boolean[];
  inOmega1: boolean[];
  inOmega2: boolean[];
}

export interface BasinTable {
  name: string;
  raw: string;
  x0: number[];
  y0: number[];
  z0: number[];
  label: BasinLabel[];
  iterations: number[];
  xHyp: boolean[];
  zHyp: boolean[];
}

export class CsvFormatError extends Error {}

export function tableName(path: string): string {
  return basename(path).replace(/\.csv$/i, "");
}

function splitRows(raw: string, path: string, header: string): string[][] {
  const lines = raw.split("\n");
  while (lines.length > 0 && lines[lines.length - 1].trim() === "") {
    lines.pop();
  }
  if (lines.length === 0) {
    throw new CsvFormatError(`${path}: empty file`);
  }
  if (lines[0].trimEnd() !== header) {
    throw new CsvFormatError(
      `${path}: header mismatch; expected "${header}", got "${lines[0]}"`,
    );
  }
  if (lines.length === 1) {
    throw new CsvFormatError(`${path}: no data rows`);
  }
  const width = header.split(",").length;
  return lines.slice(1).map((line, i) => {
    const parts = line.split(",");
    if (parts.length !== width) {
      throw new CsvFormatError(
        `${path}: row ${i + 1} has ${parts.length} fields, expected ${width}`,
      );
    }
    return parts;
  });
}

function num(field: string, where: string): number {
  const v = Number(field);
  if (field.trim() === "" || Number.isNaN(v)) {
    throw new CsvFormatError(`${where}: not a number: "${field}"`);
  }
  return v;
}

function bit(field: string, where: string): boolean {
  if (field !== "0" && field !== "1") {
    throw new CsvFormatError(`${where}: expected 0 or 1, got "${field}"`);
  }
  return field === "1";
}

export function parseTrajectoryCsv(raw: string, path: string): TrajectoryTable {
  const rows = splitRows(raw, path, TRAJECTORY_HEADER);
  const table: TrajectoryTable = {
    name: tableName(path),
    raw,
    n: [],
    x: [],
    y: [],
    z: [],
    inOmega: [],
    inOmega1: [],
    inOmega2: [],
  };
  rows.forEach((parts, i) => {
    const where = `${path}: row ${i + 1}`;
    table.n.push(num(parts[0], where));
    table.x.push(num(parts[1], where));
    table.y.push(num(parts[2], where));
    table.z.push(num(parts[3], where));
    table.inOmega.push(bit(parts[4], where));
    table.inOmega1.push(bit(parts[5], where));
    table.inOmega2.push(bit(parts[6], where));
  });
  return table;
}

export function parseBasinCsv(raw: string, path: string): BasinTable {
  const rows = splitRows(raw, path, BASIN_HEADER);
  const table: BasinTable = {
    name: tableName(path),
    raw,
    x0: [],
    y0: [],
    z0: [],
    label: [],
    iterations: [],
    xHyp: [],
    zHyp: [],
  };
  rows.forEach((parts, i) => {
    const where = `${path}: row ${i + 1}`;
    table.x0.push(num(parts[0], where));
    table.y0.push(num(parts[1], where));
    table.z0.push(num(parts[2], where));
    const label = parts[3];
    if (label !== "u1" && label !== "u2" && label !== "undecided") {
      throw new CsvFormatError(`${where}: unknown label "${label}"`);
    }
    table.label.push(label);
    table.iterations.push(num(parts[4], where));
    table.xHyp.push(bit(parts[5], where));
    table.zHyp.push(bit(parts[6], where));
  });
  return table;
}
