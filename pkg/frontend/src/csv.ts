import Papa from "papaparse";
import { SchemaError } from "./schema.js";

// === series CSV parsing ===================================================
// Cells stay verbatim strings: plotted values must be traceable to the
// source rows character-for-character, so no numeric coercion happens here.

export interface SeriesData {
  columns: string[];
  cells: string[][];
}

export function parseSeriesCsv(text: string, source: string): SeriesData {
  const result = Papa.parse<string[]>(text, {
    delimiter: ",",
    newline: "\n",
    dynamicTyping: false,
    skipEmptyLines: true,
  });
  if (result.errors.length > 0) {
    const first = result.errors[0];
    throw new SchemaError(`${source}: malformed CSV (${first.message})`);
  }
  const rows = result.data;
  if (rows.length === 0) {
    throw new SchemaError(`${source}: empty CSV`);
  }
  const [columns, ...cells] = rows;
  const bad = cells.findIndex((row) => row.length !== columns.length);
  if (bad >= 0) {
    throw new SchemaError(
      `${source}: row ${bad + 1} has ${cells[bad].length} cells, header has ${columns.length}`
    );
  }
  return { columns, cells };
}

export function columnIndex(data: SeriesData, column: string, source: string): number {
  const idx = data.columns.indexOf(column);
  if (idx < 0) {
    throw new SchemaError(`${source}: no column named ${JSON.stringify(column)}`);
  }
  return idx;
}

export function numericColumn(data: SeriesData, column: string, source: string): number[] {
  const idx = columnIndex(data, column, source);
  return data.cells.map((row, i) => {
    const value = Number(row[idx]);
    if (!Number.isFinite(value)) {
      throw new SchemaError(
        `${source}: column ${column} row ${i} is not finite: ${JSON.stringify(row[idx])}`
      );
    }
    return value;
  });
}
