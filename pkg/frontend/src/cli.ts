#!/usr/bin/env node
/**
 * render traj  --in <csv...> --summary <json> --out <img> [--layout series|orbit3d] [--integrity]
 * render basin --in <csv>    --summary <json> --out <img> --slice axis=value [--integrity]
 * render emit  --in <img> --name <table>
 *
 * Output format follows the --out extension (.svg or .png).  --integrity
 * re-reads the written image and checks the embedded tables against the
 * inputs byte for byte modulo trailing whitespace; `emit` re-emits one
 * embedded table to stdout.  Exit 0 on success, 1 on any error or
 * integrity mismatch.
 */

import { CsvFormatError } from "./csv.js";
import {
  SliceError,
  extractMetadataFromFile,
  renderBasins,
  renderTrajectories,
  verifyEmbeddedData,
  type RenderResult,
} from "./render.js";
import { SummaryFormatError } from "./summary.js";

interface Flags {
  in: string[];
  summary?: string;
  out?: string;
  slice?: string;
  layout?: string;
  name?: string;
  integrity: boolean;
}

class UsageError extends Error {}

function parseFlags(argv: string[]): Flags {
  const flags: Flags = { in: [], integrity: false };
  let i = 0;
  while (i < argv.length) {
    const arg = argv[i];
    const next = () => {
      i += 1;
      if (i >= argv.length || argv[i].startsWith("--")) {
        throw new UsageError(`${arg} needs a value`);
      }
      return argv[i];
    };
    switch (arg) {
      case "--in":
        flags.in.push(next());
        while (i + 1 < argv.length && !argv[i + 1].startsWith("--")) {
          i += 1;
          flags.in.push(argv[i]);
        }
        break;
      case "--summary":
        flags.summary = next();
        break;
      case "--out":
        flags.out = next();
        break;
      case "--slice":
        flags.slice = next();
        break;
      case "--layout":
        flags.layout = next();
        break;
      case "--name":
        flags.name = next();
        break;
      case "--integrity":
        flags.integrity = true;
        break;
      default:
        throw new UsageError(`unknown flag ${arg}`);
    }
    i += 1;
  }
  return flags;
}

function parseSlice(text: string): { axis: "x" | "y" | "z"; value: number } {
  const m = text.match(/^([xyz])=(.+)$/);
  if (!m) {
    throw new UsageError(`--slice expects axis=value, got "${text}"`);
  }
  const value = Number(m[2]);
  if (Number.isNaN(value)) {
    throw new UsageError(`--slice value is not a number: "${m[2]}"`);
  }
  return { axis: m[1] as "x" | "y" | "z", value };
}

function requireFlag<T>(v: T | undefined, name: string): T {
  if (v === undefined) {
    throw new UsageError(`${name} is required`);
  }
  return v;
}

function runIntegrity(result: RenderResult, inputs: string[]): number {
  const entries = verifyEmbeddedData(result.outPath, inputs);
  let ok = true;
  for (const entry of entries) {
    if (entry.ok) {
      console.log(`integrity ok: ${entry.name}`);
    } else {
      ok = false;
      console.error(`integrity FAILED: ${entry.name} (${entry.reason})`);
    }
  }
  return ok ? 0 : 1;
}

export function main(argv: string[]): number {
  try {
    const [command, ...rest] = argv;
    if (command === undefined) {
      throw new UsageError("a subcommand is required: traj, basin or emit");
    }
    const flags = parseFlags(rest);
    if (command === "traj") {
      if (flags.layout !== undefined && flags.layout !== "series" &&
          flags.layout !== "orbit3d") {
        throw new UsageError(`--layout must be series or orbit3d`);
      }
      const result = renderTrajectories({
        inputs: flags.in,
        summaryPath: requireFlag(flags.summary, "--summary"),
        outPath: requireFlag(flags.out, "--out"),
        layout: flags.layout as "series" | "orbit3d" | undefined,
      });
      console.log(`wrote ${result.outPath} ` +
        `(${result.metadata.legend.series.length} series, ` +
        `${result.metadata.legend.markers.length} fixed-point markers)`);
      return flags.integrity ? runIntegrity(result, flags.in) : 0;
    }
    if (command === "basin") {
      if (flags.in.length !== 1) {
        throw new UsageError("basin takes exactly one --in CSV");
      }
      const result = renderBasins({
        input: flags.in[0],
        summaryPath: requireFlag(flags.summary, "--summary"),
        outPath: requireFlag(flags.out, "--out"),
        slice: parseSlice(requireFlag(flags.slice, "--slice")),
      });
      console.log(`wrote ${result.outPath}`);
      return flags.integrity ? runIntegrity(result, flags.in) : 0;
    }
    if (command === "emit") {
      if (flags.in.length !== 1) {
        throw new UsageError("emit takes exactly one --in image");
      }
      const metadata = extractMetadataFromFile(flags.in[0]);
      const name = requireFlag(flags.name, "--name");
      const table = metadata.data[name];
      if (table === undefined) {
        throw new UsageError(
          `no table "${name}" embedded; have: ` +
          Object.keys(metadata.data).join(", "));
      }
      process.stdout.write(table);
      return 0;
    }
    throw new UsageError(`unknown subcommand ${command}`);
  } catch (err) {
    if (err instanceof UsageError || err instanceof CsvFormatError ||
        err instanceof SliceError || err instanceof SummaryFormatError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    if (err instanceof Error && (err as NodeJS.ErrnoException).code) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

import { fileURLToPath } from "node:url";

if (process.argv[1] && fileURLToPath(import.meta.url) === process.argv[1]) {
  process.exit(main(process.argv.slice(2)));
}
