#!/usr/bin/env node
// figures --in <dir> --out <dir> [--figure id] [--band-z z]
//
// Renders the standard sweep figures (asmd, mse, accept, vrr) from
// curves.csv and selection.csv into the output directory.

import { SchemaError } from "./csv";
import { DEFAULT_BAND_Z, FIGURE_IDS, FigureId, RenderError } from "./figures";
import { renderAll } from "./render";

interface Args {
  inDir: string;
  outDir: string;
  ids: FigureId[];
  bandZ: number;
}

const USAGE = `usage: figures --in <dir> --out <dir> [--figure ${FIGURE_IDS.join("|")}] [--band-z z]`;

function parseArgs(argv: string[]): Args {
  let inDir: string | null = null;
  let outDir: string | null = null;
  let bandZ = DEFAULT_BAND_Z;
  const ids: FigureId[] = [];
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    if (flag === "--help" || flag === "-h") {
      console.log(USAGE);
      process.exit(0);
    }
    const value = argv[++i];
    if (value === undefined) {
      throw new Error(`${flag} requires a value`);
    }
    switch (flag) {
      case "--in":
        inDir = value;
        break;
      case "--out":
        outDir = value;
        break;
      case "--figure":
        if (!(FIGURE_IDS as readonly string[]).includes(value)) {
          throw new Error(`unknown figure "${value}" (choose from ${FIGURE_IDS.join(", ")})`);
        }
        ids.push(value as FigureId);
        break;
      case "--band-z":
        bandZ = Number(value);
        if (!Number.isFinite(bandZ) || bandZ < 0) {
          throw new Error(`--band-z must be a nonnegative number, got "${value}"`);
        }
        break;
      default:
        throw new Error(`unknown flag "${flag}"`);
    }
  }
  if (inDir === null || outDir === null) {
    throw new Error(USAGE);
  }
  return { inDir, outDir, ids: ids.length > 0 ? ids : [...FIGURE_IDS], bandZ };
}

function main(): void {
  let args: Args;
  try {
    args = parseArgs(process.argv.slice(2));
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    process.exit(2);
  }
  try {
    renderAll(args.inDir, args.outDir, args.ids, args.bandZ, (line) => console.log(line));
  } catch (err) {
    if (err instanceof SchemaError || err instanceof RenderError) {
      console.error(`error: ${err.message}`);
      process.exit(1);
    }
    if ((err as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`error: ${(err as Error).message}`);
      process.exit(1);
    }
    throw err;
  }
}

main();
