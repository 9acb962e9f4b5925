/**
 * Reader for the experiment-harness CSV schema.
 *
 * The harness emits one flat schema for every experiment kind; figures
 * reference columns by name and fail loudly when a referenced column is
 * absent or a file carries no data rows.
 */

export const SCHEMA_COLUMNS = [
  'run_id',
  'eps',
  'n',
  't',
  'err_v',
  'err_rho',
  'combined',
  'res_vbar',
  'res_chi',
  'res_phi',
  'res_aggregate_s',
  'sigma_fit',
  'energy',
  'parity_error',
] as const;

export type ColumnName = (typeof SCHEMA_COLUMNS)[number];

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

export class CsvError extends Error {}

/** Parse simple comma-separated text (no quoting; the harness emits none). */
export function parseCsv(text: string): Table {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new CsvError('empty CSV: no header line');
  }
  const columns = lines[0].split(',').map((c) => c.trim());
  const rows = lines.slice(1).map((line, i) => {
    const parts = line.split(',');
    if (parts.length !== columns.length) {
      throw new CsvError(`row ${i + 2}: expected ${columns.length} fields, got ${parts.length}`);
    }
    const row: Record<string, string> = {};
    columns.forEach((c, j) => (row[c] = parts[j].trim()));
    return row;
  });
  if (rows.length === 0) {
    throw new CsvError('empty CSV: header but no data rows');
  }
  return { columns, rows };
}

export function requireColumns(table: Table, needed: string[]): void {
  const missing = needed.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new CsvError(`missing columns: ${missing.join(', ')} (have: ${table.columns.join(', ')})`);
  }
}

/** Numeric view of one column; NaN cells are kept as NaN. */
export function numbers(table: Table, column: string): number[] {
  requireColumns(table, [column]);
  return table.rows.map((r) => Number.parseFloat(r[column]));
}

/** Distinct values of a column in first-appearance order. */
export function distinct(table: Table, column: string): string[] {
  requireColumns(table, [column]);
  const seen = new Set<string>();
  const out: string[] = [];
  for (const row of table.rows) {
    if (!seen.has(row[column])) {
      seen.add(row[column]);
      out.push(row[column]);
    }
  }
  return out;
}

export function filterRows(table: Table, pred: (row: Record<string, string>) => boolean): Table {
  const rows = table.rows.filter(pred);
  return { columns: table.columns, rows };
}
