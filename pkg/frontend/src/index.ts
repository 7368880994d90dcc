export { parseCsv, column, MissingColumnError, Table } from "./csv.js";
export {
  parseFigspec,
  FigspecError,
  FigureSpec,
  PanelSpec,
  SeriesSpec,
} from "./figspec.js";
export {
  buildChart,
  ChartModel,
  PanelModel,
  SeriesModel,
  Axis,
  Point,
  PALETTE,
} from "./chart.js";
export { renderSvg } from "./svg.js";
export { renderPng } from "./png.js";
export {
  renderConvergence,
  renderFigspecText,
  loadPanels,
  RenderResult,
} from "./render.js";
