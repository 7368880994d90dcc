/** SVG writer for a ChartModel; deterministic output for identical input. */
import { Axis, ChartModel, PanelModel } from "./chart.js";

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function fmtTick(v: number, axis: Axis): string {
  if (axis.scale === "log") {
    const e = Math.round(Math.log10(v));
    return `1e${e}`;
  }
  if (Number.isInteger(v)) return String(v);
  return v.toPrecision(3);
}

function px(v: number): string {
  return v.toFixed(2);
}

function panelSvg(panel: PanelModel): string {
  const { plot } = panel;
  const bottom = plot.top + plot.height;
  const right = plot.left + plot.width;
  let s = "";

  s += `<text x="${px(plot.left + plot.width / 2)}" y="${px(plot.top - 10)}" text-anchor="middle" font-size="12" fill="#222">${esc(panel.title)}</text>\n`;

  const xProj = (v: number) =>
    panel.xAxis.scale === "log"
      ? plot.left + ((Math.log(v) - Math.log(panel.xAxis.min)) /
          (Math.log(panel.xAxis.max) - Math.log(panel.xAxis.min))) * plot.width
      : plot.left + ((v - panel.xAxis.min) / (panel.xAxis.max - panel.xAxis.min)) * plot.width;
  const yProj = (v: number) =>
    panel.yAxis.scale === "log"
      ? bottom - ((Math.log(v) - Math.log(panel.yAxis.min)) /
          (Math.log(panel.yAxis.max) - Math.log(panel.yAxis.min))) * plot.height
      : bottom - ((v - panel.yAxis.min) / (panel.yAxis.max - panel.yAxis.min)) * plot.height;

  for (const t of panel.xAxis.ticks) {
    const x = xProj(t);
    s += `<line x1="${px(x)}" y1="${px(plot.top)}" x2="${px(x)}" y2="${px(bottom)}" stroke="#eee" stroke-width="0.6"/>\n`;
    s += `<text x="${px(x)}" y="${px(bottom + 16)}" text-anchor="middle" font-size="10" fill="#555">${esc(fmtTick(t, panel.xAxis))}</text>\n`;
  }
  for (const t of panel.yAxis.ticks) {
    const y = yProj(t);
    s += `<line x1="${px(plot.left)}" y1="${px(y)}" x2="${px(right)}" y2="${px(y)}" stroke="#eee" stroke-width="0.6"/>\n`;
    s += `<text x="${px(plot.left - 6)}" y="${px(y + 3)}" text-anchor="end" font-size="10" fill="#555">${esc(fmtTick(t, panel.yAxis))}</text>\n`;
  }

  s += `<rect x="${px(plot.left)}" y="${px(plot.top)}" width="${px(plot.width)}" height="${px(plot.height)}" fill="none" stroke="#333" stroke-width="0.8"/>\n`;
  s += `<text x="${px(plot.left + plot.width / 2)}" y="${px(bottom + 34)}" text-anchor="middle" font-size="11" fill="#333">${esc(panel.xColumn)}${panel.xAxis.scale === "log" ? " (log)" : ""}</text>\n`;
  s += `<text x="${px(plot.left - 48)}" y="${px(plot.top + plot.height / 2)}" text-anchor="middle" font-size="11" fill="#333" transform="rotate(-90,${px(plot.left - 48)},${px(plot.top + plot.height / 2)})">${esc(panel.yColumn)}${panel.yAxis.scale === "log" ? " (log)" : ""}</text>\n`;

  for (const series of panel.series) {
    const pts = series.screen.map((p) => `${px(p.x)},${px(p.y)}`).join(" ");
    s += `<polyline fill="none" stroke="${series.color}" stroke-width="1.4" points="${pts}"/>\n`;
  }

  let ly = plot.top + 10;
  for (const series of panel.series) {
    const lx = plot.left + plot.width - 150;
    s += `<line x1="${px(lx)}" y1="${px(ly)}" x2="${px(lx + 18)}" y2="${px(ly)}" stroke="${series.color}" stroke-width="1.6"/>\n`;
    s += `<text x="${px(lx + 24)}" y="${px(ly + 3)}" font-size="10" fill="#333">${esc(series.label)}</text>\n`;
    ly += 14;
  }
  return s;
}

export function renderSvg(model: ChartModel): string {
  let s = `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${model.width} ${model.height}" font-family="Helvetica, Arial, sans-serif">\n`;
  s += `<rect width="${model.width}" height="${model.height}" fill="#fff"/>\n`;
  if (model.title) {
    s += `<text x="${px(model.width / 2)}" y="16" text-anchor="middle" font-size="13" font-weight="600" fill="#111">${esc(model.title)}</text>\n`;
  }
  for (const panel of model.panels) {
    s += panelSvg(panel);
  }
  s += "</svg>\n";
  return s;
}
