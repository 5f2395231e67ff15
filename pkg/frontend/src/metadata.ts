/**
 * The metadata block embedded in every rendered image.
 *
 * The renderer never alters or reorders its inputs: each source table is
 * embedded verbatim under `data`, keyed by its legend name, and the
 * integrity mode compares that text against the input files byte for byte
 * modulo trailing whitespace.
 */

export interface MarkerEntry {
  label: string;
  location: number[];
  biological_label?: string;
}

export interface ChartMetadata {
  generator: string;
  kind: "trajectory" | "basin";
  legend: {
    series: string[];
    markers: MarkerEntry[];
  };
  slice?: { axis: "x" | "y" | "z"; value: number };
  /** legend name -> verbatim source CSV text */
  data: Record<string, string>;
}

export const METADATA_KEY = "toppmap-data";

/** JSON with all non-ASCII escaped, safe for PNG tEXt (Latin-1) payloads. */
export function asciiJson(value: unknown): string {
  return JSON.stringify(value).replace(/[-￿]/g, (ch) =>
    "\\u" + ch.charCodeAt(0).toString(16).padStart(4, "0"),
  );
}

function stripTrailingWs(text: string): string {
  return text
    .split("\n")
    .map((line) => line.replace(/[ \t\r]+$/, ""))
    .join("\n")
    .replace(/\n+$/, "");
}

/** Byte equality modulo trailing whitespace (per line and at end of file). */
export function equalsModuloTrailingWs(a: string, b: string): boolean {
  return stripTrailingWs(a) === stripTrailingWs(b);
}
