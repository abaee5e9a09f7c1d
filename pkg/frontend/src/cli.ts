#!/usr/bin/env node
/** plot --csv results.csv --x M [--logx] --out fig.svg [--schemes TIN,SND,RS] */

import { readFileSync, writeFileSync } from "node:fs";
import { basename } from "node:path";

import { parseResultsCsv, SchemaError, X_FIELDS, XField } from "./csv.js";
import { EmptySelectionError, FigureSpec, renderFigure } from "./plot.js";

interface Args {
  csv: string;
  x: XField;
  logx: boolean;
  out: string;
  schemes: string[] | null;
  title: string | null;
}

const USAGE =
  "usage: plot --csv <results.csv> --x <M|kappa|K|sigma_shadow> [--logx] " +
  "--out <fig.svg> [--schemes TIN,SND,RS] [--title <text>]";

export function parseArgs(argv: string[]): Args {
  const args: Partial<Args> = { logx: false, schemes: null, title: null };
  for (let i = 0; i < argv.length; i += 1) {
    const flag = argv[i];
    const next = () => {
      i += 1;
      if (i >= argv.length) throw new Error(`missing value for ${flag}`);
      return argv[i];
    };
    switch (flag) {
      case "--csv":
        args.csv = next();
        break;
      case "--x":
        args.x = next() as XField;
        break;
      case "--logx":
        args.logx = true;
        break;
      case "--out":
        args.out = next();
        break;
      case "--schemes":
        args.schemes = next().split(",").filter((s) => s.length > 0);
        break;
      case "--title":
        args.title = next();
        break;
      default:
        throw new Error(`unknown flag ${flag}\n${USAGE}`);
    }
  }
  if (!args.csv || !args.x || !args.out) {
    throw new Error(USAGE);
  }
  if (!X_FIELDS.includes(args.x)) {
    throw new SchemaError(`unknown x field ${args.x}; choose from ${X_FIELDS.join(", ")}`);
  }
  return args as Args;
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
  try {
    const rows = parseResultsCsv(readFileSync(args.csv, "utf8"));
    const spec: FigureSpec = {
      xField: args.x,
      logX: args.logx,
      schemes: args.schemes,
      title: args.title ?? basename(args.csv),
    };
    const svg = renderFigure(rows, spec);
    writeFileSync(args.out, svg);
    console.error(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || err instanceof EmptySelectionError) {
      console.error(`error: ${(err as Error).message}`);
      return 2;
    }
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(basename(process.argv[1]));
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
