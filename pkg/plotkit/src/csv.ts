/**
 * Strict reader for the simulator's CSV contract: comma delimiter, LF line
 * endings, one header row, every cell after the header a finite number.
 * Malformed input raises CsvError naming the offending row and column.
 */

export class CsvError extends Error {
  constructor(message: string, readonly row: number, readonly column: string | number) {
    super(`${message} (row ${row}, column ${String(column)})`);
    this.name = "CsvError";
  }
}

export interface Table {
  columns: string[];
  /** column name -> values, row-aligned */
  data: Map<string, number[]>;
  rows: number;
}

export function parseCsv(text: string): Table {
  if (text.includes("\r")) {
    throw new CsvError("carriage return found; the contract is LF-only", 0, 0);
  }
  const lines = text.split("\n");
  while (lines.length > 0 && lines[lines.length - 1] === "") lines.pop();
  if (lines.length < 2) {
    throw new CsvError("need a header row and at least one data row", 0, 0);
  }
  const columns = lines[0].split(",");
  if (columns.some((c) => c.length === 0)) {
    throw new CsvError("empty column name in header", 0, columns.findIndex((c) => c === ""));
  }
  const seen = new Set<string>();
  for (const c of columns) {
    if (seen.has(c)) throw new CsvError(`duplicate column ${c}`, 0, c);
    seen.add(c);
  }
  const data = new Map<string, number[]>(columns.map((c) => [c, []]));
  for (let r = 1; r < lines.length; r++) {
    const cells = lines[r].split(",");
    if (cells.length !== columns.length) {
      throw new CsvError(
        `expected ${columns.length} cells, found ${cells.length}`, r, cells.length);
    }
    for (let c = 0; c < cells.length; c++) {
      const value = Number(cells[c]);
      if (cells[c] === "" || !Number.isFinite(value)) {
        throw new CsvError(`cell ${JSON.stringify(cells[c])} is not a finite number`,
                           r, columns[c]);
      }
      data.get(columns[c])!.push(value);
    }
  }
  return { columns, data, rows: lines.length - 1 };
}

/** Like parseCsv but one designated column may hold arbitrary strings
 * (the sweep CSV's tier column). */
export function parseSweepCsv(text: string, labelColumn: string): {
  columns: string[];
  numeric: Map<string, number[]>;
  labels: string[];
} {
  if (text.includes("\r")) {
    throw new CsvError("carriage return found; the contract is LF-only", 0, 0);
  }
  const lines = text.split("\n");
  while (lines.length > 0 && lines[lines.length - 1] === "") lines.pop();
  if (lines.length < 2) {
    throw new CsvError("need a header row and at least one data row", 0, 0);
  }
  const columns = lines[0].split(",");
  const labelIdx = columns.indexOf(labelColumn);
  if (labelIdx < 0) throw new CsvError(`missing column ${labelColumn}`, 0, labelColumn);
  const numeric = new Map<string, number[]>(
    columns.filter((c) => c !== labelColumn).map((c) => [c, []]));
  const labels: string[] = [];
  for (let r = 1; r < lines.length; r++) {
    const cells = lines[r].split(",");
    if (cells.length !== columns.length) {
      throw new CsvError(
        `expected ${columns.length} cells, found ${cells.length}`, r, cells.length);
    }
    for (let c = 0; c < cells.length; c++) {
      if (c === labelIdx) {
        labels.push(cells[c]);
        continue;
      }
      const value = Number(cells[c]);
      if (cells[c] === "" || !Number.isFinite(value)) {
        throw new CsvError(`cell ${JSON.stringify(cells[c])} is not a finite number`,
                           r, columns[c]);
      }
      numeric.get(columns[c])!.push(value);
    }
  }
  return { columns, numeric, labels };
}

export function requireColumn(table: Table, name: string): number[] {
  const values = table.data.get(name);
  if (values === undefined) {
    throw new CsvError(`missing column ${name}`, 0, name);
  }
  return values;
}
