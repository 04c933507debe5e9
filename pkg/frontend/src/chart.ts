// Intensity-vs-path-change chart: pure layout math separated from canvas
// painting so the geometry is testable headless.

import type { Sample } from "./types.js";

export interface Point {
  x: number;
  y: number;
}

export interface ChartLayout {
  // polyline segments in pixel space; a gap in the stream splits segments
  i1Segments: Point[][];
  i2Segments: Point[][];
  xTicks: { px: number; label: string }[];
  yTicks: { px: number; label: string }[];
  plot: { left: number; top: number; width: number; height: number };
}

export interface Margins {
  left: number;
  right: number;
  top: number;
  bottom: number;
}

export const DEFAULT_MARGINS: Margins = { left: 48, right: 12, top: 10, bottom: 30 };

function niceTicks(lo: number, hi: number, count: number): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step0 = span / Math.max(count, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= count) ?? 10 * mag;
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + 1e-12 * span; v += step) ticks.push(v);
  return ticks;
}

/** Split sample runs where the time axis jumps (stream gap: no interpolation). */
export function splitOnTimeGaps(samples: readonly Sample[], factor = 3): Sample[][] {
  if (samples.length === 0) return [];
  const dts: number[] = [];
  for (let i = 1; i < samples.length; i++) {
    dts.push((samples[i] as Sample).time_s - (samples[i - 1] as Sample).time_s);
  }
  const sorted = [...dts].sort((a, b) => a - b);
  const median = sorted.length ? (sorted[Math.floor(sorted.length / 2)] as number) : 0;
  const segments: Sample[][] = [[samples[0] as Sample]];
  for (let i = 1; i < samples.length; i++) {
    const gap = (dts[i - 1] as number) > Math.max(median * factor, 1e-9) && median > 0;
    if (gap) segments.push([]);
    (segments[segments.length - 1] as Sample[]).push(samples[i] as Sample);
  }
  return segments;
}

export function computeChartLayout(
  samples: readonly Sample[],
  width: number,
  height: number,
  margins: Margins = DEFAULT_MARGINS,
): ChartLayout {
  const plot = {
    left: margins.left,
    top: margins.top,
    width: Math.max(width - margins.left - margins.right, 1),
    height: Math.max(height - margins.top - margins.bottom, 1),
  };
  const empty: ChartLayout = { i1Segments: [], i2Segments: [], xTicks: [], yTicks: [], plot };
  if (samples.length === 0) return empty;

  let xLo = Infinity;
  let xHi = -Infinity;
  let yHi = 1.0;
  for (const s of samples) {
    xLo = Math.min(xLo, s.delta_L_um);
    xHi = Math.max(xHi, s.delta_L_um);
    yHi = Math.max(yHi, s.i1, s.i2);
  }
  if (xHi === xLo) xHi = xLo + 1e-6;
  const yLo = 0.0;
  const toX = (v: number) => plot.left + ((v - xLo) / (xHi - xLo)) * plot.width;
  const toY = (v: number) => plot.top + (1 - (v - yLo) / (yHi - yLo)) * plot.height;

  const segments = splitOnTimeGaps(samples);
  const layout: ChartLayout = {
    i1Segments: segments.map((seg) => seg.map((s) => ({ x: toX(s.delta_L_um), y: toY(s.i1) }))),
    i2Segments: segments.map((seg) => seg.map((s) => ({ x: toX(s.delta_L_um), y: toY(s.i2) }))),
    xTicks: niceTicks(xLo, xHi, 8).map((v) => ({ px: toX(v), label: v.toFixed(1) })),
    yTicks: niceTicks(yLo, yHi, 5).map((v) => ({ px: toY(v), label: v.toFixed(2) })),
    plot,
  };
  return layout;
}

export const SERIES_COLORS = { i1: "#2e9e4f", i2: "#2f6fd6" };

export function renderChart(
  ctx: CanvasRenderingContext2D,
  layout: ChartLayout,
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  const { plot } = layout;
  ctx.strokeStyle = "#47506b";
  ctx.strokeRect(plot.left, plot.top, plot.width, plot.height);
  ctx.fillStyle = "#9aa3bd";
  ctx.font = "11px system-ui, sans-serif";
  ctx.textAlign = "center";
  for (const t of layout.xTicks) {
    ctx.fillText(t.label, t.px, plot.top + plot.height + 16);
  }
  ctx.textAlign = "right";
  for (const t of layout.yTicks) {
    ctx.fillText(t.label, plot.left - 6, t.px + 4);
  }
  ctx.textAlign = "center";
  ctx.fillText("delta L (um)", plot.left + plot.width / 2, height - 4);
  const drawSeries = (segments: Point[][], color: string) => {
    ctx.strokeStyle = color;
    ctx.lineWidth = 1.4;
    for (const seg of segments) {
      if (seg.length < 2) continue;
      ctx.beginPath();
      ctx.moveTo((seg[0] as Point).x, (seg[0] as Point).y);
      for (let i = 1; i < seg.length; i++) ctx.lineTo((seg[i] as Point).x, (seg[i] as Point).y);
      ctx.stroke();
    }
  };
  drawSeries(layout.i1Segments, SERIES_COLORS.i1);
  drawSeries(layout.i2Segments, SERIES_COLORS.i2);
}
