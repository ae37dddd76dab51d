/**
 * Rasterize chart models to PNG bytes: axes with ticks, one polyline per
 * series (line charts) or one bar per row (bar charts), and a legend.
 */

import { BarChart, LineChart } from "./chart.js";
import { encodePng } from "./png.js";
import { BLACK, GREY, PALETTE, Raster, textWidth, WHITE } from "./raster.js";

export interface RenderOptions {
  width?: number;
  height?: number;
}

const MARGIN = { left: 64, right: 16, top: 24, bottom: 40 };

function formatTick(v: number): string {
  if (v === 0) {
    return "0";
  }
  const mag = Math.abs(v);
  if (mag >= 10000 || mag < 0.001) {
    return v.toExponential(1).replace("e+", "e");
  }
  return String(Number(v.toPrecision(3)));
}

interface Scale {
  lo: number;
  hi: number;
  toPixel(v: number): number;
}

function makeScale(lo: number, hi: number, pixLo: number, pixHi: number): Scale {
  if (!(hi > lo)) {
    hi = lo + 1; // degenerate ranges still render
  }
  const span = hi - lo;
  return {
    lo,
    hi,
    toPixel: (v: number) => pixLo + ((v - lo) / span) * (pixHi - pixLo),
  };
}

function ticks(lo: number, hi: number, count = 5): number[] {
  const out: number[] = [];
  for (let i = 0; i < count; i++) {
    out.push(lo + ((hi - lo) * i) / (count - 1));
  }
  return out;
}

function drawFrame(
  canvas: Raster,
  xScale: Scale,
  yScale: Scale,
  xLabel: string,
  yLabel: string,
  title: string,
): void {
  const x0 = MARGIN.left;
  const x1 = canvas.width - MARGIN.right;
  const y0 = canvas.height - MARGIN.bottom;
  const y1 = MARGIN.top;
  canvas.line(x0, y0, x1, y0, BLACK);
  canvas.line(x0, y0, x0, y1, BLACK);
  for (const t of ticks(xScale.lo, xScale.hi)) {
    const px = Math.round(xScale.toPixel(t));
    canvas.line(px, y0, px, y0 + 4, BLACK);
    const label = formatTick(t);
    canvas.text(px - textWidth(label) / 2, y0 + 8, label);
  }
  for (const t of ticks(yScale.lo, yScale.hi)) {
    const py = Math.round(yScale.toPixel(t));
    canvas.line(x0 - 4, py, x0, py, BLACK);
    const label = formatTick(t);
    canvas.text(x0 - 8 - textWidth(label), py - 3, label);
    canvas.line(x0, py, x1, py, GREY); // light guide line
  }
  canvas.text(x0 + (x1 - x0) / 2 - textWidth(xLabel) / 2, canvas.height - 14, xLabel);
  canvas.text(4, 4, yLabel);
  canvas.text(x0 + (x1 - x0) / 2 - textWidth(title) / 2, 4, title);
}

export function renderLineChart(chart: LineChart, opts: RenderOptions = {}): Uint8Array {
  const width = opts.width ?? 800;
  const height = opts.height ?? 480;
  const canvas = new Raster(width, height, WHITE);

  const xs = chart.series.flatMap((s) => s.xs);
  const ys = chart.series.flatMap((s) => s.ys);
  const xScale = makeScale(Math.min(...xs), Math.max(...xs), MARGIN.left, width - MARGIN.right);
  const yPad = 0.05 * (Math.max(...ys) - Math.min(...ys) || 1);
  const yScale = makeScale(
    Math.min(...ys) - yPad,
    Math.max(...ys) + yPad,
    height - MARGIN.bottom,
    MARGIN.top,
  );
  drawFrame(canvas, xScale, yScale, chart.xLabel, chart.yLabel, chart.title);

  chart.series.forEach((series, i) => {
    const color = PALETTE[i % PALETTE.length];
    for (let k = 1; k < series.xs.length; k++) {
      canvas.line(
        xScale.toPixel(series.xs[k - 1]),
        yScale.toPixel(series.ys[k - 1]),
        xScale.toPixel(series.xs[k]),
        yScale.toPixel(series.ys[k]),
        color,
        2,
      );
    }
    const ly = MARGIN.top + 6 + i * 12;
    const lx = width - MARGIN.right - 150;
    canvas.fillRect(lx, ly, 10, 8, color);
    canvas.text(lx + 14, ly, series.label);
  });
  return encodePng(width, height, canvas.pixels);
}

export function renderBarChart(chart: BarChart, opts: RenderOptions = {}): Uint8Array {
  const width = opts.width ?? 560;
  const height = opts.height ?? 420;
  const canvas = new Raster(width, height, WHITE);

  const values = chart.bars.map((b) => b.value);
  const lo = Math.min(0, ...values);
  const hi = Math.max(0, ...values);
  const pad = 0.08 * (hi - lo || 1);
  const yScale = makeScale(lo - (lo < 0 ? pad : 0), hi + pad, height - MARGIN.bottom, MARGIN.top);
  const xScale = makeScale(0, chart.bars.length, MARGIN.left, width - MARGIN.right);
  drawFrame(canvas, xScale, yScale, "", chart.yLabel, chart.title);

  const zero = yScale.toPixel(0);
  chart.bars.forEach((bar, i) => {
    const color = PALETTE[0];
    const cx0 = xScale.toPixel(i + 0.2);
    const cx1 = xScale.toPixel(i + 0.8);
    const top = yScale.toPixel(bar.value);
    canvas.fillRect(cx0, Math.min(top, zero), cx1 - cx0, Math.abs(top - zero), color);
    canvas.text(
      (cx0 + cx1) / 2 - textWidth(bar.label) / 2,
      height - MARGIN.bottom + 8,
      bar.label,
    );
  });
  return encodePng(width, height, canvas.pixels);
}
