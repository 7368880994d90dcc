/** Figure rendering pipeline: figspec -> chart model -> SVG + PNG files. */
import { readFileSync, mkdirSync, writeFileSync } from "node:fs";
import path from "node:path";

import { buildChart, ChartModel, LoadedPanel } from "./chart.js";
import { parseCsv } from "./csv.js";
import { FigureSpec, parseFigspec } from "./figspec.js";
import { renderPng } from "./png.js";
import { renderSvg } from "./svg.js";

export interface RenderResult {
  model: ChartModel;
  svgPath: string;
  pngPath: string;
  warnings: string[];
}

export function loadPanels(fig: FigureSpec, baseDir: string): LoadedPanel[] {
  return fig.panels.map((spec) => ({
    spec,
    tables: spec.series.map((s) => {
      const csvPath = path.isAbsolute(s.csv) ? s.csv : path.join(baseDir, s.csv);
      return parseCsv(readFileSync(csvPath, "utf-8"), csvPath);
    }),
  }));
}

export function renderFigspecText(text: string, baseDir: string): {
  model: ChartModel;
  fig: FigureSpec;
  svg: string;
  png: Uint8Array;
} {
  const fig = parseFigspec(text);
  const model = buildChart(fig, loadPanels(fig, baseDir));
  return { model, fig, svg: renderSvg(model), png: renderPng(model) };
}

export function renderConvergence(figspecPath: string): RenderResult {
  const baseDir = path.dirname(path.resolve(figspecPath));
  const { model, fig, svg, png } = renderFigspecText(
    readFileSync(figspecPath, "utf-8"),
    baseDir
  );
  const stem = fig.output.replace(/\.(svg|png)$/i, "");
  const outBase = path.isAbsolute(stem) ? stem : path.join(baseDir, stem);
  mkdirSync(path.dirname(outBase), { recursive: true });
  const svgPath = `${outBase}.svg`;
  const pngPath = `${outBase}.png`;
  writeFileSync(svgPath, svg);
  writeFileSync(pngPath, png);
  const warnings = model.panels.flatMap((p) => p.warnings);
  return { model, svgPath, pngPath, warnings };
}
