/**
 * CSV reading for the experiment harness output schemas.
 *
 * Both the per-generation trace files and the aggregate files are plain
 * comma-separated numeric tables with one header line; unavailable values
 * are written as `nan`. Columns are addressed by header name so either
 * schema (or future extensions) can be plotted.
 */

export class MissingColumnError extends Error {
  constructor(column: string, source: string) {
    super(`column '${column}' not present in ${source} `);
    this.name = "MissingColumnError";
  }
}

export interface Table {
  /** Where the data came from, for error messages. */
  source: string;
  columns: string[];
  /** Column-major numeric data, aligned with `columns`. */
  data: Map<string, number[]>;
  rows: number;
}

export function parseCsv(text: string, source = "<string>"): Table {
  const lines = text.split("\n").filter((line) => line.trim().length > 0);
  if (lines.length === 0) {
    throw new Error(`empty CSV: ${source}`);
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  const data = new Map<string, number[]>(columns.map((c) => [c, []]));
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== columns.length) {
      throw new Error(
        `${source}: row ${i} has ${parts.length} fields, expected ${columns.length}`
      );
    }
    for (let j = 0; j < columns.length; j++) {
      data.get(columns[j])!.push(Number(parts[j]));
    }
  }
  return { source, columns, data, rows: lines.length - 1 };
}

export function column(table: Table, name: string): number[] {
  const values = table.data.get(name);
  if (values === undefined) {
    throw new MissingColumnError(name, table.source);
  }
  return values;
}
