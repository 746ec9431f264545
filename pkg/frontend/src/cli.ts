#!/usr/bin/env node
/**
 * plots --csv <path> --kind <mse_snr|pd_snr|pd_k|srp_snr> --out <path> [--series M]
 *
 * Reads a sweep result CSV and writes one SVG figure.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { NoDataError, SchemaError, parseCsv } from "./csv.js";
import { FIGURE_KINDS, FigureKind, buildFigure } from "./figure.js";
import { renderSvg } from "./svg.js";

interface CliArgs {
  csv: string;
  kind: FigureKind;
  out: string;
  series: string;
}

export function parseArgs(argv: string[]): CliArgs {
  const values = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    if (!flag.startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`expected --flag value pairs, got "${flag}"`);
    }
    values.set(flag.slice(2), argv[i + 1]);
  }
  const csv = values.get("csv");
  const kind = values.get("kind");
  const out = values.get("out");
  if (!csv || !kind || !out) {
    throw new Error("usage: plots --csv <path> --kind <kind> --out <path> [--series M]");
  }
  if (!FIGURE_KINDS.includes(kind as FigureKind)) {
    throw new Error(`unknown kind "${kind}"; expected one of ${FIGURE_KINDS.join(", ")}`);
  }
  return { csv, kind: kind as FigureKind, out, series: values.get("series") ?? "M" };
}

export function renderFile(args: CliArgs): void {
  const table = parseCsv(readFileSync(args.csv, "utf-8"));
  const figure = buildFigure(table, { kind: args.kind, seriesKey: args.series });
  writeFileSync(args.out, renderSvg(figure), "utf-8");
}

export function main(argv: string[]): number {
  try {
    const args = parseArgs(argv);
    renderFile(args);
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || err instanceof NoDataError) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
