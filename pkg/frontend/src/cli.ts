#!/usr/bin/env node
/**
 * plot loss-curves <ledger.csv>... -o out.png [--decomposed] [--labels a,b]
 * plot sl-diff <summary.csv> -o out.png
 *
 * Exit codes: 0 success, 2 usage or schema error.
 */

import { writeFileSync } from "node:fs";

import { buildLossCurves, buildSwitchingGap } from "./chart.js";
import { SchemaError } from "./csv.js";
import { renderBarChart, renderLineChart } from "./render.js";

export interface ParsedArgs {
  command: string;
  inputs: string[];
  output: string;
  decomposed: boolean;
  labels?: string[];
}

export function parseArgs(argv: string[]): ParsedArgs {
  if (argv.length === 0) {
    throw new SchemaError("usage: plot <loss-curves|sl-diff> <csv>... -o out.png");
  }
  const [command, ...rest] = argv;
  if (command !== "loss-curves" && command !== "sl-diff") {
    throw new SchemaError(`unknown command ${JSON.stringify(command)}`);
  }
  const inputs: string[] = [];
  let output = "";
  let decomposed = false;
  let labels: string[] | undefined;
  for (let i = 0; i < rest.length; i++) {
    const arg = rest[i];
    if (arg === "-o" || arg === "--output") {
      output = rest[++i] ?? "";
    } else if (arg === "--decomposed") {
      decomposed = true;
    } else if (arg === "--labels") {
      labels = (rest[++i] ?? "").split(",").filter((l) => l.length > 0);
    } else if (arg.startsWith("-")) {
      throw new SchemaError(`unknown flag ${JSON.stringify(arg)}`);
    } else {
      inputs.push(arg);
    }
  }
  if (!output) {
    throw new SchemaError("missing -o <output.png>");
  }
  if (inputs.length === 0) {
    throw new SchemaError("missing input CSV paths");
  }
  if (command === "sl-diff" && inputs.length !== 1) {
    throw new SchemaError("sl-diff takes exactly one summary CSV");
  }
  return { command, inputs, output, decomposed, labels };
}

export function run(argv: string[]): number {
  let args: ParsedArgs;
  try {
    args = parseArgs(argv);
    let png: Uint8Array;
    if (args.command === "loss-curves") {
      const chart = buildLossCurves(args.inputs, {
        decomposed: args.decomposed,
        labels: args.labels,
      });
      png = renderLineChart(chart);
      console.log(`wrote ${args.output} (${chart.series.length} series)`);
    } else {
      const chart = buildSwitchingGap(args.inputs[0]);
      png = renderBarChart(chart);
      console.log(`wrote ${args.output} (${chart.bars.length} bars)`);
    }
    writeFileSync(args.output, png);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || (err as NodeJS.ErrnoException)?.code === "ENOENT") {
      console.error(`error: ${(err as Error).message}`);
      return 2;
    }
    throw err;
  }
}

