import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { buildLossCurves, buildSwitchingGap } from "../src/chart.js";
import { encodePng, pngDimensions } from "../src/png.js";
import { renderBarChart, renderLineChart } from "../src/render.js";

const FIXTURES = join(__dirname, "fixtures");
const LEDGERS = [
  join(FIXTURES, "ledger_oa_sigma2.csv"),
  join(FIXTURES, "ledger_oco_sigma2.csv"),
];

const PNG_MAGIC = [0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a];

describe("png encoder", () => {
  it("produces a well-formed header with the right dimensions", () => {
    const png = encodePng(3, 2, new Uint8Array(3 * 2 * 4));
    expect([...png.slice(0, 8)]).toEqual(PNG_MAGIC);
    expect(pngDimensions(png)).toEqual({ width: 3, height: 2 });
  });

  it("rejects a mis-sized buffer", () => {
    expect(() => encodePng(2, 2, new Uint8Array(3))).toThrow(/expected/);
  });
});

describe("renderLineChart", () => {
  it("writes a PNG with the requested dimensions", () => {
    const chart = buildLossCurves(LEDGERS);
    const png = renderLineChart(chart, { width: 640, height: 400 });
    expect([...png.slice(0, 8)]).toEqual(PNG_MAGIC);
    expect(pngDimensions(png)).toEqual({ width: 640, height: 400 });
  });

  it("is deterministic for identical inputs", () => {
    const chart = buildLossCurves(LEDGERS, { decomposed: true });
    const a = renderLineChart(chart);
    const b = renderLineChart(chart);
    expect(Buffer.from(a).equals(Buffer.from(b))).toBe(true);
  });
});

describe("renderBarChart", () => {
  it("renders one PNG per summary with default dimensions", () => {
    const chart = buildSwitchingGap(join(FIXTURES, "sigma_summary.csv"));
    const png = renderBarChart(chart);
    expect(pngDimensions(png)).toEqual({ width: 560, height: 420 });
  });

  it("handles a single-bar chart", () => {
    const png = renderBarChart({
      kind: "bar",
      title: "gap",
      yLabel: "gap",
      bars: [{ label: "sigma=1", value: 0.25 }],
    });
    expect(pngDimensions(png).width).toBe(560);
  });
});
