/**
 * Figure assembly: pick the axes for a figure kind, group rows into one
 * series per grouping-column value, and sort everything deterministically.
 */

import { NoDataError, ResultTable, requireColumns } from "./csv.js";

export type FigureKind = "mse_snr" | "pd_snr" | "pd_k" | "srp_snr";

export const FIGURE_KINDS: FigureKind[] = ["mse_snr", "pd_snr", "pd_k", "srp_snr"];

export interface FigureSpec {
  kind: FigureKind;
  /** Column used to split rows into series (one line per value). */
  seriesKey?: string;
}

export interface AxisInfo {
  column: string;
  label: string;
  log: boolean;
}

export interface Series {
  label: string;
  points: { x: number; y: number }[];
}

export interface Figure {
  title: string;
  x: AxisInfo;
  y: AxisInfo;
  series: Series[];
}

const KIND_AXES: Record<FigureKind, { x: AxisInfo; y: AxisInfo; title: string }> = {
  mse_snr: {
    title: "Localization MSE vs SNR",
    x: { column: "snr_db", label: "SNR (dB)", log: false },
    y: { column: "mse", label: "MSE (m²)", log: true },
  },
  pd_snr: {
    title: "Detection probability vs SNR",
    x: { column: "snr_db", label: "SNR (dB)", log: false },
    y: { column: "p_d", label: "probability of detection", log: false },
  },
  pd_k: {
    title: "Detection probability vs number of targets",
    x: { column: "K", label: "number of targets K", log: false },
    y: { column: "p_d", label: "probability of detection", log: false },
  },
  srp_snr: {
    title: "Successful recovery probability vs SNR",
    x: { column: "snr_db", label: "SNR (dB)", log: false },
    y: { column: "srp", label: "successful recovery probability", log: false },
  },
};

export function buildFigure(table: ResultTable, spec: FigureSpec): Figure {
  const axes = KIND_AXES[spec.kind];
  if (axes === undefined) {
    throw new NoDataError(`unknown figure kind "${spec.kind}"`);
  }
  const seriesKey = spec.seriesKey ?? "M";
  requireColumns(table, [axes.x.column, axes.y.column, seriesKey]);

  const groups = new Map<number, { x: number; y: number }[]>();
  for (const row of table.rows) {
    const key = row[seriesKey];
    const x = row[axes.x.column];
    const y = row[axes.y.column];
    // empty cells (undefined metric) are skipped, not drawn as zeros
    if (key === null || x === null || y === null) {
      continue;
    }
    if (axes.y.log && y <= 0) {
      continue;
    }
    if (!groups.has(key)) {
      groups.set(key, []);
    }
    groups.get(key)!.push({ x, y });
  }
  const series: Series[] = [...groups.entries()]
    .sort((a, b) => a[0] - b[0])
    .map(([value, points]) => ({
      label: `${seriesKey} = ${formatNumber(value)}`,
      points: points.slice().sort((p, q) => p.x - q.x),
    }));
  if (series.length === 0) {
    throw new NoDataError(`no plottable rows for kind "${spec.kind}"`);
  }
  return { title: axes.title, x: axes.x, y: axes.y, series };
}

export function formatNumber(value: number): string {
  if (Number.isInteger(value)) {
    return value.toString();
  }
  return Number(value.toPrecision(6)).toString();
}
