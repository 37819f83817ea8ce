import { readFileSync } from "node:fs";
import Papa from "papaparse";

import { EmptyInput, HIST_COLUMNS, METRICS_COLUMNS, SchemaMismatch } from "./types.js";

export type Row = Record<string, string>;

function parse(path: string, expected: readonly string[]): Row[] {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    throw new EmptyInput(`cannot read input CSV: ${path}`);
  }
  const parsed = Papa.parse<Row>(text.trim(), { header: true, skipEmptyLines: true });
  const got = parsed.meta.fields ?? [];
  if (got.join(",") !== expected.join(",")) {
    throw new SchemaMismatch(
      `header mismatch in ${path}: expected "${expected.join(",")}", got "${got.join(",")}"`,
    );
  }
  if (parsed.data.length === 0) {
    throw new EmptyInput(`no data rows in ${path}`);
  }
  return parsed.data;
}

export function readMetricsCsv(path: string): Row[] {
  return parse(path, METRICS_COLUMNS);
}

export function readHistCsv(path: string): Row[] {
  return parse(path, HIST_COLUMNS);
}

export function num(row: Row, col: string): number {
  const v = Number(row[col]);
  if (!Number.isFinite(v)) {
    throw new SchemaMismatch(`non-numeric value ${JSON.stringify(row[col])} in column ${col}`);
  }
  return v;
}
