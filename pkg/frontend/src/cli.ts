#!/usr/bin/env node
/**
 * Usage: plot <figspec-path>
 *
 * Reads a figure specification (see figspec.ts for the format), loads the
 * referenced experiment CSVs, and writes <output>.svg and <output>.png.
 */
import { renderConvergence } from "./render.js";

export function main(argv: string[]): number {
  const args = argv[0] === "plot" ? argv.slice(1) : argv;
  if (args.length !== 1 || args[0] === "--help" || args[0] === "-h") {
    console.error("usage: plot <figspec-path>");
    return 2;
  }
  try {
    const result = renderConvergence(args[0]);
    for (const warning of result.warnings) {
      console.warn(`warning: ${warning}`);
    }
    const points = result.model.panels.reduce(
      (n, p) => n + p.series.reduce((m, s) => m + s.points.length, 0), 0
    );
    console.log(
      `wrote ${result.svgPath} and ${result.pngPath} ` +
      `(${result.model.panels.length} panel(s), ${points} points)`
    );
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

process.exit(main(process.argv.slice(2)));
