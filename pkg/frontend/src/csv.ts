// Reader for the fixed-schema trajectory CSV emitted by the simulator CLI.

import {readFileSync} from 'fs';
import Papa from 'papaparse';

// Column order is pinned by the simulator; renderings must reject anything else.
export const CSV_COLUMNS = [
  't',
  'x0', 'x1', 'x2',
  'v0', 'v1', 'v2',
  'R00', 'R01', 'R02', 'R10', 'R11', 'R12', 'R20', 'R21', 'R22',
  'W0', 'W1', 'W2',
  'f',
  'M0', 'M1', 'M2',
  'f1', 'f2', 'f3', 'f4',
  'ex0', 'ex1', 'ex2',
  'ev0', 'ev1', 'ev2',
  'eR0', 'eR1', 'eR2',
  'eW0', 'eW1', 'eW2',
  'Psi', 'V1', 'V2', 'V', 'V3',
] as const;

export type ColumnName = (typeof CSV_COLUMNS)[number];

export type FlightLog = Record<ColumnName, number[]>;

export class SchemaError extends Error {}

export function parseLogText(text: string): FlightLog {
  const parsed = Papa.parse<string[]>(text.trim(), {skipEmptyLines: true});
  if (parsed.errors.length > 0) {
    throw new SchemaError(`CSV parse failure: ${parsed.errors[0].message}`);
  }
  const rows = parsed.data;
  if (rows.length === 0) {
    throw new SchemaError('CSV is empty (missing header row)');
  }
  const header = rows[0];
  if (header.length !== CSV_COLUMNS.length ||
      !CSV_COLUMNS.every((name, i) => header[i] === name)) {
    throw new SchemaError(
        `unexpected columns: got [${header.join(',')}], ` +
        `want [${CSV_COLUMNS.join(',')}]`);
  }
  const log = Object.fromEntries(
      CSV_COLUMNS.map((name) => [name, [] as number[]])) as FlightLog;
  for (let r = 1; r < rows.length; r++) {
    const row = rows[r];
    if (row.length !== CSV_COLUMNS.length) {
      throw new SchemaError(`row ${r} has ${row.length} fields, want ${CSV_COLUMNS.length}`);
    }
    for (let c = 0; c < CSV_COLUMNS.length; c++) {
      const value = Number(row[c]);
      if (!Number.isFinite(value)) {
        throw new SchemaError(`row ${r}, column ${CSV_COLUMNS[c]}: not a number: ${row[c]}`);
      }
      log[CSV_COLUMNS[c]].push(value);
    }
  }
  return log;
}

export function readLog(path: string): FlightLog {
  return parseLogText(readFileSync(path, 'utf8'));
}
