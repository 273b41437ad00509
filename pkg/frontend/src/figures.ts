// The four standard figures built from the sweep tables.
//
// Every figure plots the held-out (test split) threshold curves on a log
// epsilon axis with one line per sample size and a shaded +-z*SE band. The
// mse and vrr figures additionally mark each selected threshold from
// selection.csv with a dashed vertical line.

import { buildChart, fmt, Point, Series, VLine } from "./svg";
import { CurveRow, SelectionRow } from "./csv";

export class RenderError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "RenderError";
  }
}

export const FIGURE_IDS = ["asmd", "mse", "accept", "vrr"] as const;
export type FigureId = (typeof FIGURE_IDS)[number];

export const DEFAULT_BAND_Z = 1.96;

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

const MARKER_COLOR = "#555555";

interface FigureDef {
  title: string;
  yLabel: string;
  value: (row: CurveRow) => number | null;
  se: (row: CurveRow) => number | null;
  markers: boolean; // draw epsilon-star lines from selection.csv
  hLines: { y: number; label: string }[];
}

const FIGURES: Record<FigureId, FigureDef> = {
  asmd: {
    title: "Covariate imbalance among accepted assignments",
    yLabel: "mean ASMD (accepted)",
    value: (r) => r.asmd_mean,
    se: (r) => r.asmd_se,
    markers: false,
    hLines: [],
  },
  mse: {
    title: "Test-split MSE of the treatment effect estimate",
    yLabel: "MSE",
    value: (r) => r.mse,
    se: (r) => r.mse_se,
    markers: true,
    hLines: [],
  },
  accept: {
    title: "Single-draw acceptance probability",
    yLabel: "P(accept)",
    value: (r) => r.accept_prob_single,
    se: (r) => r.accept_prob_single_se,
    markers: false,
    hLines: [],
  },
  vrr: {
    title: "Variance relative to complete randomization",
    yLabel: "Var ratio vs CR",
    value: (r) => r.vrr,
    se: (r) => r.vrr_se,
    markers: true,
    hLines: [{ y: 1.0, label: "CR baseline" }],
  },
};

// ---------------------------------------------------------------------------
// Row selection
// ---------------------------------------------------------------------------

export function scenariosIn(curves: CurveRow[]): string[] {
  const seen: string[] = [];
  for (const row of curves) {
    if (!seen.includes(row.scenario)) {
      seen.push(row.scenario);
    }
  }
  return seen;
}

function testRows(curves: CurveRow[], scenario: string): CurveRow[] {
  const rows = curves.filter(
    (r) => r.scenario === scenario && r.split === "test" && r.design === "fsm",
  );
  if (rows.length === 0) {
    throw new RenderError(`no test-split rows for scenario "${scenario}"`);
  }
  return rows;
}

function sampleSizes(rows: CurveRow[]): number[] {
  return [...new Set(rows.map((r) => r.n))].sort((a, b) => a - b);
}

function seriesFor(rows: CurveRow[], def: FigureDef): Series[] {
  const sizes = sampleSizes(rows);
  const series: Series[] = [];
  for (let i = 0; i < sizes.length; i++) {
    const n = sizes[i];
    const points: Point[] = [];
    for (const row of rows.filter((r) => r.n === n)) {
      const y = def.value(row);
      if (row.epsilon === null || y === null) {
        continue;
      }
      points.push({ x: row.epsilon, y, se: def.se(row) });
    }
    points.sort((a, b) => a.x - b.x);
    series.push({ label: `n = ${n}`, color: PALETTE[i % PALETTE.length], points });
  }
  return series;
}

// One dashed line per distinct selected threshold, any rule.
function markerLines(selection: SelectionRow[], scenario: string): VLine[] {
  const values = [
    ...new Set(
      selection.filter((r) => r.scenario === scenario).map((r) => r.epsilon_star),
    ),
  ].sort((a, b) => a - b);
  return values.map((x) => ({
    x,
    color: MARKER_COLOR,
    label: `ε* = ${fmt(x)}`,
  }));
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

export function buildFigure(
  id: FigureId,
  curves: CurveRow[],
  selection: SelectionRow[],
  scenario: string,
  bandZ: number = DEFAULT_BAND_Z,
): string {
  const def = FIGURES[id];
  const rows = testRows(curves, scenario);
  const series = seriesFor(rows, def);
  if (series.every((s) => s.points.length === 0)) {
    throw new RenderError(`figure "${id}": no plottable values for scenario "${scenario}"`);
  }
  const vLines = def.markers ? markerLines(selection, scenario) : [];
  return buildChart({
    title: `${def.title} (${scenario})`,
    xLabel: "acceptance threshold ε (log scale)",
    yLabel: def.yLabel,
    series,
    vLines,
    hLines: def.hLines,
    bandZ,
    logX: true,
  });
}
