/**
 * Deterministic SVG rendering for line figures: fixed canvas, decade ticks
 * on logarithmic axes, one colored polyline with markers per series, and a
 * legend box. Output depends only on the figure contents, so re-rendering
 * is byte-stable.
 */

import { Figure, Series, formatNumber } from "./figure.js";

const WIDTH = 680;
const HEIGHT = 460;
const MARGIN = { left: 78, right: 24, top: 42, bottom: 58 };

const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

interface Scale {
  (value: number): number;
  ticks: number[];
}

function linearScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  const span = hi - lo;
  const step = niceStep(span);
  const tickLo = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let t = tickLo; t <= hi + 1e-9 * Math.abs(step); t += step) {
    ticks.push(Math.abs(t) < 1e-12 ? 0 : t);
  }
  const scale = (value: number) => outLo + ((value - lo) / span) * (outHi - outLo);
  scale.ticks = ticks;
  return scale;
}

function logScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const logLo = Math.floor(Math.log10(lo));
  const logHi = Math.ceil(Math.log10(hi));
  const spanLo = logLo === logHi ? logLo - 1 : logLo;
  const ticks: number[] = [];
  for (let d = spanLo; d <= logHi; d++) {
    ticks.push(Math.pow(10, d));
  }
  const scale = (value: number) =>
    outLo + ((Math.log10(value) - spanLo) / (logHi - spanLo)) * (outHi - outLo);
  scale.ticks = ticks;
  return scale;
}

function niceStep(span: number): number {
  const raw = span / 6;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const mult of [1, 2, 5, 10]) {
    if (raw <= mult * mag) {
      return mult * mag;
    }
  }
  return 10 * mag;
}

function extent(series: Series[], pick: (p: { x: number; y: number }) => number): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const s of series) {
    for (const p of s.points) {
      const v = pick(p);
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  return [lo, hi];
}

function escapeXml(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderSvg(figure: Figure): string {
  const plotLeft = MARGIN.left;
  const plotRight = WIDTH - MARGIN.right;
  const plotTop = MARGIN.top;
  const plotBottom = HEIGHT - MARGIN.bottom;

  const [xLo, xHi] = extent(figure.series, (p) => p.x);
  const [yLo, yHi] = extent(figure.series, (p) => p.y);
  const xScale = linearScale(xLo, xHi, plotLeft, plotRight);
  const yScale = figure.y.log
    ? logScale(yLo, yHi, plotBottom, plotTop)
    : linearScale(Math.min(0, yLo), Math.max(yHi, 1), plotBottom, plotTop);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<text x="${(plotLeft + plotRight) / 2}" y="24" text-anchor="middle" font-size="16">` +
      `${escapeXml(figure.title)}</text>`,
  );

  // gridlines and ticks
  for (const t of xScale.ticks) {
    const x = xScale(t);
    parts.push(
      `<line x1="${fmt(x)}" y1="${plotTop}" x2="${fmt(x)}" y2="${plotBottom}" stroke="#dddddd"/>`,
    );
    parts.push(
      `<text x="${fmt(x)}" y="${plotBottom + 18}" text-anchor="middle" font-size="12">` +
        `${formatNumber(t)}</text>`,
    );
  }
  for (const t of yScale.ticks) {
    const y = yScale(t);
    parts.push(
      `<line x1="${plotLeft}" y1="${fmt(y)}" x2="${plotRight}" y2="${fmt(y)}" stroke="#dddddd"/>`,
    );
    const label = figure.y.log ? formatLog(t) : formatNumber(t);
    parts.push(
      `<text x="${plotLeft - 8}" y="${fmt(y + 4)}" text-anchor="end" font-size="12">${label}</text>`,
    );
  }
  parts.push(
    `<rect x="${plotLeft}" y="${plotTop}" width="${plotRight - plotLeft}" ` +
      `height="${plotBottom - plotTop}" fill="none" stroke="#333333"/>`,
  );

  // axis labels
  parts.push(
    `<text x="${(plotLeft + plotRight) / 2}" y="${HEIGHT - 16}" text-anchor="middle" ` +
      `font-size="13">${escapeXml(figure.x.label)}</text>`,
  );
  parts.push(
    `<text x="22" y="${(plotTop + plotBottom) / 2}" text-anchor="middle" font-size="13" ` +
      `transform="rotate(-90 22 ${(plotTop + plotBottom) / 2})">${escapeXml(figure.y.label)}</text>`,
  );

  // series
  figure.series.forEach((series, index) => {
    const color = PALETTE[index % PALETTE.length];
    const coords = series.points.map((p) => `${fmt(xScale(p.x))},${fmt(yScale(p.y))}`);
    if (coords.length > 1) {
      parts.push(
        `<polyline fill="none" stroke="${color}" stroke-width="2" points="${coords.join(" ")}"/>`,
      );
    }
    for (const c of coords) {
      const [x, y] = c.split(",");
      parts.push(`<circle cx="${x}" cy="${y}" r="3.5" fill="${color}"/>`);
    }
  });

  // legend
  const legendX = plotRight - 110;
  const legendY = plotTop + 10;
  parts.push(
    `<rect x="${legendX - 10}" y="${legendY - 14}" width="118" ` +
      `height="${figure.series.length * 18 + 10}" fill="white" stroke="#999999"/>`,
  );
  figure.series.forEach((series, index) => {
    const color = PALETTE[index % PALETTE.length];
    const y = legendY + index * 18;
    parts.push(
      `<line x1="${legendX}" y1="${y}" x2="${legendX + 22}" y2="${y}" stroke="${color}" stroke-width="2"/>`,
    );
    parts.push(`<circle cx="${legendX + 11}" cy="${y}" r="3" fill="${color}"/>`);
    parts.push(
      `<text x="${legendX + 28}" y="${y + 4}" font-size="12">${escapeXml(series.label)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

function fmt(value: number): string {
  return value.toFixed(2);
}

function formatLog(value: number): string {
  const exp = Math.round(Math.log10(value));
  if (exp >= -2 && exp <= 3) {
    return formatNumber(value);
  }
  return `1e${exp}`;
}
