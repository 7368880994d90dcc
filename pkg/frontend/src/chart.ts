/**
 * Chart model: pure data describing what will be drawn.
 *
 * The renderer performs no aggregation of its own; every curve is exactly
 * the (x, y) columns of one CSV, filtered to points representable under the
 * panel's scales (log axes drop non-positive values). Tests assert on this
 * model rather than on pixels.
 */
import { Table, column } from "./csv.js";
import { FigureSpec, PanelSpec } from "./figspec.js";

export interface Point {
  x: number;
  y: number;
}

export interface SeriesModel {
  label: string;
  color: string;
  /** Data-space points, in CSV row order. */
  points: Point[];
  /** Screen-space polyline, aligned with `points`. */
  screen: Point[];
}

export interface Axis {
  scale: "log" | "linear";
  min: number;
  max: number;
  ticks: number[];
}

export interface PanelModel {
  title: string;
  xColumn: string;
  yColumn: string;
  xAxis: Axis;
  yAxis: Axis;
  series: SeriesModel[];
  warnings: string[];
  /** Panel plot-area rectangle in figure coordinates. */
  plot: { left: number; top: number; width: number; height: number };
}

export interface ChartModel {
  title: string;
  width: number;
  height: number;
  panels: PanelModel[];
}

export const PALETTE = [
  "#2166ac", "#b2182b", "#1b7837", "#e08214", "#762a83", "#35978f",
];

const MARGIN = { left: 64, right: 16, top: 40, bottom: 48 };

function logTicks(min: number, max: number): number[] {
  const ticks: number[] = [];
  const lo = Math.ceil(Math.log10(min) - 1e-9);
  const hi = Math.floor(Math.log10(max) + 1e-9);
  const step = Math.max(1, Math.ceil((hi - lo) / 8));
  for (let e = lo; e <= hi; e += step) ticks.push(Math.pow(10, e));
  return ticks;
}

function linearTicks(min: number, max: number): number[] {
  const range = max - min || 1;
  const rough = range / 5;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => s >= rough)!;
  const ticks: number[] = [];
  for (let v = Math.ceil(min / step) * step; v <= max + step * 1e-9; v += step) {
    ticks.push(v);
  }
  return ticks;
}

function makeAxis(scale: "log" | "linear", values: number[]): Axis {
  let min = Infinity;
  let max = -Infinity;
  for (const v of values) {
    if (!Number.isFinite(v)) continue;
    if (scale === "log" && v <= 0) continue;
    if (v < min) min = v;
    if (v > max) max = v;
  }
  if (min > max) {
    // nothing plottable; keep a degenerate but valid axis
    min = scale === "log" ? 1 : 0;
    max = scale === "log" ? 10 : 1;
  }
  if (min === max) {
    if (scale === "log") {
      min /= 2;
      max *= 2;
    } else {
      min -= 0.5;
      max += 0.5;
    }
  }
  const ticks = scale === "log" ? logTicks(min, max) : linearTicks(min, max);
  return { scale, min, max, ticks };
}

function project(axis: Axis, v: number, lo: number, hi: number): number {
  const t =
    axis.scale === "log"
      ? (Math.log(v) - Math.log(axis.min)) / (Math.log(axis.max) - Math.log(axis.min))
      : (v - axis.min) / (axis.max - axis.min);
  return lo + t * (hi - lo);
}

export interface LoadedPanel {
  spec: PanelSpec;
  tables: Table[];
}

export function buildChart(fig: FigureSpec, loaded: LoadedPanel[]): ChartModel {
  const panelWidth = fig.width / fig.panels.length;
  const panels: PanelModel[] = [];

  loaded.forEach(({ spec, tables }, index) => {
    const warnings: string[] = [];
    const raw: { label: string; points: Point[] }[] = [];
    tables.forEach((table, i) => {
      const xs = column(table, spec.x);
      const ys = column(table, spec.y);
      const points: Point[] = [];
      for (let r = 0; r < xs.length; r++) {
        const ok =
          Number.isFinite(xs[r]) &&
          Number.isFinite(ys[r]) &&
          (spec.xscale !== "log" || xs[r] > 0) &&
          (spec.yscale !== "log" || ys[r] > 0);
        if (ok) points.push({ x: xs[r], y: ys[r] });
      }
      if (points.length === 0) {
        warnings.push(
          `series '${spec.series[i].label}' has no plottable points for ` +
          `${spec.y} and is skipped`
        );
      } else {
        raw.push({ label: spec.series[i].label, points });
      }
    });

    const xAxis = makeAxis(spec.xscale, raw.flatMap((s) => s.points.map((p) => p.x)));
    const yAxis = makeAxis(spec.yscale, raw.flatMap((s) => s.points.map((p) => p.y)));

    const left = index * panelWidth + MARGIN.left;
    const top = MARGIN.top;
    const width = panelWidth - MARGIN.left - MARGIN.right;
    const height = fig.height - MARGIN.top - MARGIN.bottom;

    const series = raw.map((s, i) => ({
      label: s.label,
      color: PALETTE[i % PALETTE.length],
      points: s.points,
      screen: s.points.map((p) => ({
        x: project(xAxis, p.x, left, left + width),
        y: project(yAxis, p.y, top + height, top),
      })),
    }));

    panels.push({
      title: spec.title,
      xColumn: spec.x,
      yColumn: spec.y,
      xAxis,
      yAxis,
      series,
      warnings,
      plot: { left, top, width, height },
    });
  });

  return { title: fig.title, width: fig.width, height: fig.height, panels };
}
