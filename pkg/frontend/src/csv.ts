import { readFileSync } from "node:fs";

export interface Table {
  header: string[];
  rows: string[][];
}

export class FigureError extends Error {}

/** Minimal RFC-4180-ish CSV parser (quoted cells, CRLF tolerant). */
export function parseCsv(text: string): Table {
  const records: string[][] = [];
  let cell = "";
  let record: string[] = [];
  let inQuotes = false;
  let i = 0;
  const push = () => {
    record.push(cell);
    cell = "";
  };
  const endRecord = () => {
    push();
    if (record.length > 1 || record[0] !== "") records.push(record);
    record = [];
  };
  while (i < text.length) {
    const ch = text[i];
    if (inQuotes) {
      if (ch === '"') {
        if (text[i + 1] === '"') {
          cell += '"';
          i += 2;
          continue;
        }
        inQuotes = false;
        i++;
        continue;
      }
      cell += ch;
      i++;
      continue;
    }
    if (ch === '"') {
      inQuotes = true;
      i++;
    } else if (ch === ",") {
      push();
      i++;
    } else if (ch === "\n") {
      endRecord();
      i++;
    } else if (ch === "\r") {
      i++;
    } else {
      cell += ch;
      i++;
    }
  }
  if (cell !== "" || record.length > 0) endRecord();
  if (records.length === 0) throw new FigureError("empty CSV: no header row");
  const [header, ...rows] = records;
  return { header, rows };
}

export function readCsv(path: string): Table {
  return parseCsv(readFileSync(path, "utf-8"));
}

/** Map required column names to indices; name the first missing one. */
export function requireColumns(
  table: Table,
  columns: string[],
  context: string,
): Record<string, number> {
  const index: Record<string, number> = {};
  for (const name of columns) {
    const i = table.header.indexOf(name);
    if (i < 0) {
      throw new FigureError(`missing column "${name}" in ${context}`);
    }
    index[name] = i;
  }
  return index;
}

export function requireRows(table: Table, context: string): void {
  if (table.rows.length === 0) {
    throw new FigureError(`no data rows in ${context}`);
  }
}
