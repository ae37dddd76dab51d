/**
 * CSV ingestion for the experiment outputs.
 *
 * Parsers validate headers up front and raise a SchemaError naming the
 * offending file; numeric cells are parsed strictly.
 */

import { readFileSync } from "node:fs";

export class SchemaError extends Error {}

export interface Table {
  path: string;
  header: string[];
  rows: number[][];
}

export const LEDGER_HEADER = [
  "round",
  "operating",
  "switching",
  "cum_operating",
  "cum_switching",
  "avg_operating",
  "avg_switching",
  "avg_total",
];

export const SIGMA_SUMMARY_HEADER = ["sigma", "oa_sl", "oco_sl", "diff"];

export function parseCsv(path: string): Table {
  const text = readFileSync(path, "utf-8");
  const lines = text
    .split("\n")
    .map((l) => l.trim())
    .filter((l) => l.length > 0 && !l.startsWith("#"));
  if (lines.length === 0) {
    throw new SchemaError(`${path}: empty CSV`);
  }
  const header = lines[0].split(",").map((c) => c.trim());
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new SchemaError(
        `${path}:${i + 1}: expected ${header.length} cells, got ${cells.length}`,
      );
    }
    const row = cells.map((c) => {
      const v = Number(c);
      if (!Number.isFinite(v)) {
        throw new SchemaError(`${path}:${i + 1}: non-numeric cell ${JSON.stringify(c)}`);
      }
      return v;
    });
    rows.push(row);
  }
  if (rows.length === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }
  return { path, header, rows };
}

export function requireColumns(table: Table, columns: string[]): Map<string, number> {
  const index = new Map<string, number>();
  for (const col of columns) {
    const at = table.header.indexOf(col);
    if (at < 0) {
      throw new SchemaError(`${table.path}: missing column ${JSON.stringify(col)}`);
    }
    index.set(col, at);
  }
  return index;
}

export function readLedger(path: string): Table {
  const table = parseCsv(path);
  requireColumns(table, LEDGER_HEADER);
  return table;
}

export function readSigmaSummary(path: string): Table {
  const table = parseCsv(path);
  requireColumns(table, SIGMA_SUMMARY_HEADER);
  return table;
}

export function column(table: Table, name: string): number[] {
  const at = requireColumns(table, [name]).get(name)!;
  return table.rows.map((r) => r[at]);
}
