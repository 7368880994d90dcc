/**
 * Figure specification files: the same flat `key = value` format as the
 * experiment configs, with `[figure]` and `[panel]` section headers.
 *
 *     [figure]
 *     output = figures/rescue        # .svg and .png are appended
 *     title  = noise rescue, d=2000
 *
 *     [panel]
 *     title  = reference fitness
 *     x      = evals_used            # default
 *     y      = ref_fitness_gmean     # required, a CSV column name
 *     xscale = log                   # log | linear (default log)
 *     yscale = log
 *     series = plain_agg.csv : plain LM-MA-ES
 *     series = uh_agg.csv : with re-evaluation
 *
 * `series` may repeat (one line per curve, `path : label`); every other key
 * takes a single value. Relative CSV paths resolve against the figspec's
 * own directory. `#` starts a comment.
 */

export interface SeriesSpec {
  csv: string;
  label: string;
}

export interface PanelSpec {
  title: string;
  x: string;
  y: string;
  xscale: "log" | "linear";
  yscale: "log" | "linear";
  series: SeriesSpec[];
}

export interface FigureSpec {
  output: string;
  title: string;
  width: number;
  height: number;
  panels: PanelSpec[];
}

export class FigspecError extends Error {
  constructor(message: string, line?: number) {
    super(line === undefined ? message : `line ${line}: ${message}`);
    this.name = "FigspecError";
  }
}

const FIGURE_KEYS = new Set(["output", "title", "width", "height"]);
const PANEL_KEYS = new Set(["title", "x", "y", "xscale", "yscale", "series"]);

function parseScale(value: string, line: number): "log" | "linear" {
  if (value === "log" || value === "linear") return value;
  throw new FigspecError(`scale must be 'log' or 'linear', got '${value}'`, line);
}

export function parseFigspec(text: string): FigureSpec {
  let section: "none" | "figure" | "panel" = "none";
  const figure: Partial<FigureSpec> & { panels: PanelSpec[] } = { panels: [] };
  let panel: (Partial<PanelSpec> & { series: SeriesSpec[] }) | null = null;
  let panelLine = 0;

  const finishPanel = () => {
    if (panel === null) return;
    if (!panel.y) throw new FigspecError("panel needs a 'y' column", panelLine);
    if (panel.series.length === 0) {
      throw new FigspecError("panel needs at least one 'series'", panelLine);
    }
    figure.panels.push({
      title: panel.title ?? panel.y,
      x: panel.x ?? "evals_used",
      y: panel.y,
      xscale: panel.xscale ?? "log",
      yscale: panel.yscale ?? "log",
      series: panel.series,
    });
    panel = null;
  };

  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const lineno = i + 1;
    const line = lines[i].split("#", 1)[0].trim();
    if (!line) continue;
    if (line === "[figure]") {
      finishPanel();
      section = "figure";
      continue;
    }
    if (line === "[panel]") {
      finishPanel();
      section = "panel";
      panel = { series: [] };
      panelLine = lineno;
      continue;
    }
    if (line.startsWith("[")) {
      throw new FigspecError(`unknown section header ${line}`, lineno);
    }
    const eq = line.indexOf("=");
    if (eq < 0) {
      throw new FigspecError(`expected 'key = value', got '${line}'`, lineno);
    }
    const key = line.slice(0, eq).trim();
    const value = line.slice(eq + 1).trim();
    if (!value) throw new FigspecError(`empty value for '${key}'`, lineno);

    if (section === "figure") {
      if (!FIGURE_KEYS.has(key)) {
        throw new FigspecError(`unknown [figure] key '${key}'`, lineno);
      }
      if (key === "width" || key === "height") {
        const n = Number(value);
        if (!Number.isFinite(n) || n <= 0) {
          throw new FigspecError(`'${key}' must be a positive number`, lineno);
        }
        figure[key] = n;
      } else {
        figure[key as "output" | "title"] = value;
      }
    } else if (section === "panel") {
      if (!PANEL_KEYS.has(key)) {
        throw new FigspecError(`unknown [panel] key '${key}'`, lineno);
      }
      if (key === "series") {
        const sep = value.indexOf(":");
        if (sep < 0) {
          throw new FigspecError(
            `series must be 'csv-path : label', got '${value}'`, lineno
          );
        }
        panel!.series.push({
          csv: value.slice(0, sep).trim(),
          label: value.slice(sep + 1).trim(),
        });
      } else if (key === "xscale" || key === "yscale") {
        panel![key] = parseScale(value, lineno);
      } else {
        panel![key as "title" | "x" | "y"] = value;
      }
    } else {
      throw new FigspecError(`key '${key}' outside of a section`, lineno);
    }
  }
  finishPanel();

  if (!figure.output) throw new FigspecError("missing [figure] key 'output'");
  if (figure.panels.length === 0) throw new FigspecError("no [panel] sections");
  return {
    output: figure.output,
    title: figure.title ?? "",
    width: figure.width ?? 480 * figure.panels.length,
    height: figure.height ?? 360,
    panels: figure.panels,
  };
}
