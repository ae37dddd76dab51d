import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { column, parseCsv, readLedger, readSigmaSummary, SchemaError } from "../src/csv.js";

const FIXTURES = join(__dirname, "fixtures");

function tmpFile(name: string, content: string): string {
  const dir = mkdtempSync(join(tmpdir(), "plots-"));
  const path = join(dir, name);
  writeFileSync(path, content);
  return path;
}

describe("parseCsv", () => {
  it("reads a ledger fixture", () => {
    const table = readLedger(join(FIXTURES, "ledger_oa_sigma1.csv"));
    expect(table.header[0]).toBe("round");
    expect(table.rows.length).toBe(120);
    const rounds = column(table, "round");
    expect(rounds[0]).toBe(1);
    expect(rounds.at(-1)).toBe(120);
  });

  it("reads the sigma summary fixture", () => {
    const table = readSigmaSummary(join(FIXTURES, "sigma_summary.csv"));
    expect(table.rows.length).toBe(3);
    expect(column(table, "sigma")).toEqual([1.0, 1.5, 2.0]);
  });

  it("rejects an empty file naming it", () => {
    const path = tmpFile("empty.csv", "");
    expect(() => parseCsv(path)).toThrow(SchemaError);
    expect(() => parseCsv(path)).toThrow(/empty.csv/);
  });

  it("rejects a header-only file", () => {
    const path = tmpFile("headeronly.csv", "round,avg_total\n");
    expect(() => parseCsv(path)).toThrow(/no data rows/);
  });

  it("rejects missing columns naming the file", () => {
    const path = tmpFile("short.csv", "round,operating\n1,0.5\n");
    expect(() => readLedger(path)).toThrow(/short.csv: missing column/);
  });

  it("rejects non-numeric cells with their line number", () => {
    const path = tmpFile("bad.csv", "round,avg_total\n1,zebra\n");
    expect(() => parseCsv(path)).toThrow(/bad.csv:2/);
  });

  it("rejects ragged rows", () => {
    const path = tmpFile("ragged.csv", "a,b\n1,2\n3\n");
    expect(() => parseCsv(path)).toThrow(/ragged.csv:3/);
  });
});
