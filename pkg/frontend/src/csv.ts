/**
 * Strict reader for the sweep result CSV.
 *
 * Expected header:
 *   snr_db,M,K,P,mse,p_d,srp,mean_runtime_ms,mapping_failures
 *
 * Empty cells mean "undefined" (the harness writes undefined MSE that way)
 * and parse to null. Anything else must be numeric.
 */

export class SchemaError extends Error {
  constructor(public readonly column: string, detail: string) {
    super(`column "${column}": ${detail}`);
    this.name = "SchemaError";
  }
}

export class NoDataError extends Error {
  constructor(detail: string) {
    super(detail);
    this.name = "NoDataError";
  }
}

export type ResultRow = Record<string, number | null>;

export interface ResultTable {
  columns: string[];
  rows: ResultRow[];
}

export function parseCsv(text: string): ResultTable {
  const lines = text.split("\n").filter((line) => line.trim().length > 0);
  if (lines.length === 0) {
    throw new NoDataError("CSV file is empty");
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  const rows: ResultRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== columns.length) {
      throw new SchemaError(
        columns[Math.min(cells.length, columns.length) - 1] ?? "?",
        `row ${i} has ${cells.length} cells, expected ${columns.length}`,
      );
    }
    const row: ResultRow = {};
    for (let c = 0; c < columns.length; c++) {
      const cell = cells[c].trim();
      if (cell === "") {
        row[columns[c]] = null;
        continue;
      }
      const value = Number(cell);
      if (!Number.isFinite(value)) {
        throw new SchemaError(columns[c], `row ${i} value "${cell}" is not numeric`);
      }
      row[columns[c]] = value;
    }
    rows.push(row);
  }
  return { columns, rows };
}

/** Assert the named columns exist, raising a SchemaError for the first miss. */
export function requireColumns(table: ResultTable, names: string[]): void {
  for (const name of names) {
    if (!table.columns.includes(name)) {
      throw new SchemaError(name, "missing from CSV header");
    }
  }
}
