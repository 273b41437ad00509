// Typed readers for the sweep output tables (curves.csv, selection.csv).
//
// Both files carry a "# <schema> v1" banner on the first line followed by an
// ordinary header row. Readers verify the banner and the required columns up
// front so a renamed or missing column fails loudly with the column name
// instead of producing an empty figure.

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

export interface CurveRow {
  scenario: string;
  n: number;
  epsilon: number | null; // empty for benchmark designs (cr)
  split: string;
  design: string;
  asmd_mean: number | null;
  asmd_se: number | null;
  bias: number | null;
  variance: number | null;
  mse: number | null;
  mse_se: number | null;
  accept_prob_single: number | null;
  accept_prob_single_se: number | null;
  accept_within_attempts: number | null;
  exhaustion_rate: number | null;
  avg_neyman_var: number | null;
  vrr: number | null;
  vrr_se: number | null;
  r_effective: number;
}

export interface SelectionRow {
  scenario: string;
  n: number;
  rule: string;
  min_accept: number | null;
  epsilon_star: number;
  train_mse: number;
  test_mse: number | null;
  test_mse_se: number | null;
  test_asmd: number | null;
  test_accept_within_attempts: number | null;
  feasible_band_lo: number | null;
  feasible_band_hi: number | null;
}

const CURVES_BANNER = "# fsmsweep curves v1";
const SELECTION_BANNER = "# fsmsweep selection v1";

const CURVE_COLUMNS = [
  "scenario",
  "n",
  "epsilon",
  "split",
  "design",
  "asmd_mean",
  "asmd_se",
  "bias",
  "variance",
  "mse",
  "mse_se",
  "accept_prob_single",
  "accept_prob_single_se",
  "accept_within_attempts",
  "exhaustion_rate",
  "avg_neyman_var",
  "vrr",
  "vrr_se",
  "r_effective",
];

const SELECTION_COLUMNS = [
  "scenario",
  "n",
  "rule",
  "min_accept",
  "epsilon_star",
  "train_mse",
  "test_mse",
  "test_mse_se",
  "test_asmd",
  "test_accept_within_attempts",
  "feasible_band_lo",
  "feasible_band_hi",
];

// Columns kept as strings; everything else is numeric (empty cell -> null).
const TEXT_COLUMNS = new Set(["scenario", "split", "design", "rule", "status"]);

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

function parseTable(
  path: string,
  banner: string,
  columns: string[],
): Record<string, string>[] {
  const text = readFileSync(path, "utf8");
  const firstLine = text.slice(0, text.indexOf("\n"));
  if (firstLine.trim() !== banner) {
    throw new SchemaError(
      `${path}: expected banner "${banner}", found "${firstLine.trim()}"`,
    );
  }
  const body = text.slice(text.indexOf("\n") + 1);
  const parsed = Papa.parse<Record<string, string>>(body, {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new SchemaError(`${path}: ${first.message} (row ${first.row})`);
  }
  const fields = parsed.meta.fields ?? [];
  const missing = columns.filter((c) => !fields.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `${path}: missing column ${missing.map((c) => `"${c}"`).join(", ")}`,
    );
  }
  return parsed.data;
}

function toNumber(path: string, column: string, raw: string): number | null {
  if (raw === "") {
    return null;
  }
  const value = Number(raw);
  if (!Number.isFinite(value)) {
    throw new SchemaError(`${path}: column "${column}" has non-numeric value "${raw}"`);
  }
  return value;
}

function convertRow(
  path: string,
  columns: string[],
  raw: Record<string, string>,
): Record<string, string | number | null> {
  const row: Record<string, string | number | null> = {};
  for (const column of columns) {
    const cell = raw[column];
    row[column] = TEXT_COLUMNS.has(column) ? cell : toNumber(path, column, cell);
  }
  return row;
}

export function loadCurves(path: string): CurveRow[] {
  const rows = parseTable(path, CURVES_BANNER, CURVE_COLUMNS);
  return rows.map((raw) => convertRow(path, CURVE_COLUMNS, raw) as unknown as CurveRow);
}

export function loadSelection(path: string): SelectionRow[] {
  const rows = parseTable(path, SELECTION_BANNER, SELECTION_COLUMNS);
  return rows.map(
    (raw) => convertRow(path, SELECTION_COLUMNS, raw) as unknown as SelectionRow,
  );
}
