/**
 * Figure geometry, separated from pixel painting so tests can check the
 * band and bar positions against the CSV values directly.
 *
 * Transient figure: per-symmetry median line with a p05-p95 band on a
 * log10 y axis, time clipped to [0, pi/2].  RMSE figure: one bar per
 * symmetry at the median with p20/p80 whiskers on a linear axis from 0.
 */

import type { RmseRow, SummaryRow } from "./csv.js";
import type { RGB, Pt } from "./raster.js";

export interface Rect {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface Tick {
  value: number;
  pos: number; // pixel coordinate along the axis
  label: string;
}

export const COLORS: Record<string, RGB> = {
  dp: [214, 39, 40],
  se23: [31, 119, 180],
  se3r3: [44, 160, 44],
};
const FALLBACK: RGB = [120, 120, 120];

export function colorFor(symmetry: string): RGB {
  return COLORS[symmetry] ?? FALLBACK;
}

// ---------------------------------------------------------------------------
// Transient band figure
// ---------------------------------------------------------------------------

export interface BandSeries {
  symmetry: string;
  color: RGB;
  median: Pt[];
  upper: Pt[]; // p95
  lower: Pt[]; // p05
}

export interface TransientLayout {
  width: number;
  height: number;
  plot: Rect;
  tMax: number;
  yFloor: number; // values are clamped up to this before log10
  logMin: number; // y axis decade range
  logMax: number;
  xTicks: Tick[];
  yTicks: Tick[];
  series: BandSeries[];
}

export interface TransientOpts {
  width?: number;
  height?: number;
  tMax?: number;
  yFloor?: number;
}

export function transientX(l: TransientLayout, t: number): number {
  return l.plot.x + (t / l.tMax) * l.plot.w;
}

export function transientY(l: TransientLayout, v: number): number {
  const lv = Math.log10(Math.max(v, l.yFloor));
  return l.plot.y + ((l.logMax - lv) / (l.logMax - l.logMin)) * l.plot.h;
}

function groupBySymmetry<T extends { symmetry: string }>(rows: T[]): Map<string, T[]> {
  const groups = new Map<string, T[]>();
  for (const r of rows) {
    const g = groups.get(r.symmetry);
    if (g) g.push(r);
    else groups.set(r.symmetry, [r]);
  }
  return groups;
}

export function transientLayout(rows: SummaryRow[], opts: TransientOpts = {}): TransientLayout {
  const width = opts.width ?? 720;
  const height = opts.height ?? 420;
  const tMax = opts.tMax ?? Math.PI / 2;
  const yFloor = opts.yFloor ?? 1e-12;
  const plot: Rect = { x: 64, y: 24, w: width - 64 - 144, h: height - 24 - 44 };

  const kept = rows.filter((r) => r.t <= tMax + 1e-9);
  if (kept.length === 0) throw new Error("transient: no rows at or before tMax");

  let lo = Infinity;
  let hi = -Infinity;
  for (const r of kept) {
    lo = Math.min(lo, Math.max(r.p05, yFloor));
    hi = Math.max(hi, Math.max(r.p95, yFloor));
  }
  let logMin = Math.floor(Math.log10(lo));
  let logMax = Math.ceil(Math.log10(hi));
  if (logMax === logMin) logMax += 1;

  const layout: TransientLayout = {
    width, height, plot, tMax, yFloor, logMin, logMax,
    xTicks: [], yTicks: [], series: [],
  };

  const nx = 5;
  for (let i = 0; i < nx; i++) {
    const t = (tMax * i) / (nx - 1);
    layout.xTicks.push({ value: t, pos: transientX(layout, t), label: t.toFixed(2) });
  }
  const decadeStep = Math.max(1, Math.ceil((logMax - logMin) / 8));
  for (let d = logMin; d <= logMax; d += decadeStep) {
    const v = Math.pow(10, d);
    layout.yTicks.push({ value: v, pos: transientY(layout, v), label: `1e${d}` });
  }

  for (const [symmetry, group] of groupBySymmetry(kept)) {
    const sorted = [...group].sort((a, b) => a.t - b.t);
    layout.series.push({
      symmetry,
      color: colorFor(symmetry),
      median: sorted.map((r) => ({ x: transientX(layout, r.t), y: transientY(layout, r.p50) })),
      upper: sorted.map((r) => ({ x: transientX(layout, r.t), y: transientY(layout, r.p95) })),
      lower: sorted.map((r) => ({ x: transientX(layout, r.t), y: transientY(layout, r.p05) })),
    });
  }
  return layout;
}

// ---------------------------------------------------------------------------
// RMSE bar figure
// ---------------------------------------------------------------------------

export interface Bar {
  symmetry: string;
  color: RGB;
  rect: Rect; // bar body, top edge at the median
  whiskerX: number;
  whiskerTop: number; // p80 in pixels (smaller y)
  whiskerBottom: number; // p20 in pixels
}

export interface RmseLayout {
  width: number;
  height: number;
  plot: Rect;
  yMax: number;
  yTicks: Tick[];
  bars: Bar[];
}

export interface RmseOpts {
  width?: number;
  height?: number;
}

export function rmseY(l: RmseLayout, v: number): number {
  return l.plot.y + (1 - v / l.yMax) * l.plot.h;
}

function niceStep(range: number, count: number): number {
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  for (const m of [1, 2, 5, 10]) if (m * mag >= rough) return m * mag;
  return 10 * mag;
}

export function rmseLayout(rows: RmseRow[], opts: RmseOpts = {}): RmseLayout {
  if (rows.length === 0) throw new Error("rmse: no rows");
  const width = opts.width ?? 480;
  const height = opts.height ?? 360;
  const plot: Rect = { x: 64, y: 24, w: width - 64 - 24, h: height - 24 - 44 };

  const top = Math.max(...rows.map((r) => Math.max(r.p80, r.p50)));
  const yMax = top > 0 ? 1.15 * top : 1.0;
  const layout: RmseLayout = { width, height, plot, yMax, yTicks: [], bars: [] };

  const step = niceStep(yMax, 5);
  for (let v = 0; v <= yMax + 1e-12 * yMax; v += step) {
    layout.yTicks.push({ value: v, pos: rmseY(layout, v), label: formatTick(v) });
  }

  const slot = plot.w / rows.length;
  rows.forEach((r, i) => {
    const barW = 0.6 * slot;
    const x = plot.x + slot * i + 0.2 * slot;
    const yTop = rmseY(layout, r.p50);
    layout.bars.push({
      symmetry: r.symmetry,
      color: colorFor(r.symmetry),
      rect: { x, y: yTop, w: barW, h: plot.y + plot.h - yTop },
      whiskerX: x + barW / 2,
      whiskerTop: rmseY(layout, r.p80),
      whiskerBottom: rmseY(layout, r.p20),
    });
  });
  return layout;
}

function formatTick(v: number): string {
  if (v === 0) return "0";
  if (v >= 0.01 && v < 1000) {
    const s = v.toFixed(3);
    return s.replace(/0+$/, "").replace(/\.$/, "");
  }
  return v.toExponential(0).replace("e-", "e-").replace("e+", "e+");
}
