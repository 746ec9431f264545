export { NoDataError, SchemaError, parseCsv, requireColumns } from "./csv.js";
export type { ResultRow, ResultTable } from "./csv.js";
export { FIGURE_KINDS, buildFigure, formatNumber } from "./figure.js";
export type { Figure, FigureKind, FigureSpec, Series } from "./figure.js";
export { renderSvg } from "./svg.js";
export { main, parseArgs, renderFile } from "./cli.js";
