/**
 * Chart models: plain data extracted from the CSV tables, one step before
 * rasterization. Nothing here recomputes any quantity; the CSVs are the
 * single numerical source.
 */

import { basename } from "node:path";

import { column, readLedger, readSigmaSummary, SchemaError, Table } from "./csv.js";

export interface Series {
  label: string;
  xs: number[];
  ys: number[];
}

export interface LineChart {
  kind: "line";
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
}

export interface Bar {
  label: string;
  value: number;
}

export interface BarChart {
  kind: "bar";
  title: string;
  yLabel: string;
  bars: Bar[];
}

function ledgerLabel(path: string): string {
  return basename(path).replace(/^ledger_/, "").replace(/\.csv$/, "");
}

export interface LossCurveOptions {
  decomposed?: boolean;
  labels?: string[];
}

export function buildLossCurves(paths: string[], opts: LossCurveOptions = {}): LineChart {
  if (paths.length === 0) {
    throw new SchemaError("need at least one ledger CSV");
  }
  if (opts.labels && opts.labels.length !== paths.length) {
    throw new SchemaError(
      `got ${opts.labels.length} labels for ${paths.length} ledgers`,
    );
  }
  const series: Series[] = [];
  paths.forEach((path, i) => {
    const table = readLedger(path);
    const rounds = column(table, "round");
    const label = opts.labels?.[i] ?? ledgerLabel(path);
    series.push({ label: `${label} total`, xs: rounds, ys: column(table, "avg_total") });
    if (opts.decomposed) {
      series.push({
        label: `${label} operating`,
        xs: rounds,
        ys: column(table, "avg_operating"),
      });
      series.push({
        label: `${label} switching`,
        xs: rounds,
        ys: column(table, "avg_switching"),
      });
    }
  });
  return {
    kind: "line",
    title: "average loss per round",
    xLabel: "round",
    yLabel: "average loss",
    series,
  };
}

export function buildSwitchingGap(path: string): BarChart {
  const table: Table = readSigmaSummary(path);
  const sigmas = column(table, "sigma");
  const diffs = column(table, "diff");
  const bars = sigmas.map((s, i) => ({ label: `sigma=${s}`, value: diffs[i] }));
  return {
    kind: "bar",
    title: "switching-loss gap (OCO - OA)",
    yLabel: "gap",
    bars,
  };
}
