import { readFileSync } from "node:fs";
import Papa from "papaparse";

export type Row = Record<string, string | number>;

export interface Table {
  columns: string[];
  rows: Row[];
}

/**
 * Read one of the result CSVs. Leading "#" lines carry provenance
 * (config hash, seed, n) and are skipped; the first remaining line is the
 * header. Numeric fields are converted, everything else stays a string.
 */
export function readTable(path: string): Table {
  const text = readFileSync(path, "utf8");
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0 && !l.startsWith("#"));
  const parsed = Papa.parse<Row>(lines.join("\n"), {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new Error(`${path}: CSV parse error at row ${e.row}: ${e.message}`);
  }
  const columns = parsed.meta.fields ?? [];
  return { columns, rows: parsed.data };
}

/** Assert that the table has the given columns; lists every missing one. */
export function requireColumns(table: Table, path: string, needed: string[]): void {
  const missing = needed.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new Error(
      `${path}: missing column(s) ${missing.join(", ")}; found ${table.columns.join(", ")}`,
    );
  }
}

/** Rows whose `column` equals `value` (string comparison). */
export function filterRows(rows: Row[], column: string, value: string): Row[] {
  return rows.filter((r) => String(r[column]) === value);
}

/** Distinct values of a column in first-appearance order. */
export function distinct(rows: Row[], column: string): string[] {
  const seen = new Set<string>();
  const out: string[] = [];
  for (const r of rows) {
    const v = String(r[column]);
    if (!seen.has(v)) {
      seen.add(v);
      out.push(v);
    }
  }
  return out;
}

export function numbers(rows: Row[], column: string): number[] {
  return rows.map((r) => {
    const v = Number(r[column]);
    if (!Number.isFinite(v)) {
      throw new Error(`non-finite value in column ${column}: ${r[column]}`);
    }
    return v;
  });
}
