/** Reader for the simulator's trajectory CSV.
 *
 * Columns are looked up by header name only; the on-disk order never
 * matters to the figures.
 */

import Papa from "papaparse";
import { MissingColumn, SchemaMismatch } from "./errors.js";

export class RunTable {
  private readonly index = new Map<string, number>();

  constructor(
    readonly columns: readonly string[],
    private readonly cells: Float64Array,
    readonly rows: number,
  ) {
    columns.forEach((name, i) => this.index.set(name, i));
  }

  has(name: string): boolean {
    return this.index.has(name);
  }

  /** Column by name; throws MissingColumn when absent. */
  column(name: string): Float64Array {
    const j = this.index.get(name);
    if (j === undefined) {
      throw new MissingColumn(`column "${name}" not present in CSV header`);
    }
    const width = this.columns.length;
    const out = new Float64Array(this.rows);
    for (let i = 0; i < this.rows; i++) out[i] = this.cells[i * width + j]!;
    return out;
  }
}

export function parseRunCsv(text: string, source = "<input>"): RunTable {
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0]!;
    throw new SchemaMismatch(`${source}: CSV parse error: ${first.message}`);
  }
  const grid = parsed.data;
  if (grid.length < 1) {
    throw new SchemaMismatch(`${source}: empty CSV`);
  }
  const header = grid[0]!.map((h) => h.trim());
  if (header.some((h) => h.length === 0)) {
    throw new SchemaMismatch(`${source}: blank column name in header`);
  }
  const seen = new Set<string>();
  for (const name of header) {
    if (seen.has(name)) {
      throw new SchemaMismatch(`${source}: duplicate column "${name}"`);
    }
    seen.add(name);
  }
  const width = header.length;
  const rows = grid.length - 1;
  if (rows < 1) {
    throw new SchemaMismatch(`${source}: CSV has a header but no data rows`);
  }
  const cells = new Float64Array(rows * width);
  for (let i = 0; i < rows; i++) {
    const line = grid[i + 1]!;
    if (line.length !== width) {
      throw new SchemaMismatch(
        `${source}: row ${i + 2} has ${line.length} fields, header has ${width}`,
      );
    }
    for (let j = 0; j < width; j++) {
      const v = Number(line[j]);
      if (!Number.isFinite(v)) {
        throw new SchemaMismatch(
          `${source}: row ${i + 2}, column "${header[j]}": not a finite number: ${line[j]}`,
        );
      }
      cells[i * width + j] = v;
    }
  }
  return new RunTable(header, cells, rows);
}
