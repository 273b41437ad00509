// Reads the sweep tables from an input directory and writes one SVG per
// requested figure (per scenario, when the tables hold more than one).

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { loadCurves, loadSelection } from "./csv";
import { buildFigure, DEFAULT_BAND_Z, FigureId, scenariosIn } from "./figures";

export function renderAll(
  inDir: string,
  outDir: string,
  ids: FigureId[],
  bandZ: number = DEFAULT_BAND_Z,
  log: (line: string) => void = () => {},
): string[] {
  const curves = loadCurves(join(inDir, "curves.csv"));
  const needSelection = ids.some((id) => id === "mse" || id === "vrr");
  const selection = needSelection ? loadSelection(join(inDir, "selection.csv")) : [];
  const scenarios = scenariosIn(curves);
  mkdirSync(outDir, { recursive: true });
  const written: string[] = [];
  for (const scenario of scenarios) {
    for (const id of ids) {
      const svg = buildFigure(id, curves, selection, scenario, bandZ);
      const name = scenarios.length === 1 ? `${id}.svg` : `${id}_${scenario}.svg`;
      const path = join(outDir, name);
      writeFileSync(path, svg);
      written.push(path);
      log(`wrote ${path}`);
    }
  }
  return written;
}
