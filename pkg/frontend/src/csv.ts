/**
 * Minimal CSV reading for the simulator's output files.
 *
 * The files are machine-written (UTF-8, LF, no quoting), so parsing is a
 * straight split.  Header validation is strict: any deviation from the
 * frozen contract, including column order, is rejected so that drift
 * between the components is caught at parse time.
 */

import { readFileSync } from "node:fs";

export interface Table {
  header: string[];
  rows: string[][];
  path: string;
}

export class HeaderMismatchError extends Error {
  constructor(path: string, expected: readonly string[], got: string[]) {
    super(
      `${path}: header [${got.join(",")}] does not match the frozen ` +
        `contract [${expected.join(",")}]`,
    );
    this.name = "HeaderMismatchError";
  }
}

export class EmptyDataError extends Error {
  constructor(path: string) {
    super(`${path}: no data rows`);
    this.name = "EmptyDataError";
  }
}

export function parseCsv(text: string, path = "<string>"): Table {
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new EmptyDataError(path);
  }
  const [first, ...rest] = lines;
  return {
    header: (first as string).split(","),
    rows: rest.map((line) => line.split(",")),
    path,
  };
}

export function readCsv(path: string): Table {
  return parseCsv(readFileSync(path, "utf8"), path);
}

function headerEquals(a: string[], b: readonly string[]): boolean {
  return a.length === b.length && a.every((v, i) => v === b[i]);
}

/** Enforce one of the allowed frozen headers; returns the matched one. */
export function requireHeader(
  table: Table,
  ...allowed: readonly (readonly string[])[]
): readonly string[] {
  for (const candidate of allowed) {
    if (headerEquals(table.header, candidate)) {
      if (table.rows.length === 0) {
        throw new EmptyDataError(table.path);
      }
      return candidate;
    }
  }
  throw new HeaderMismatchError(table.path, allowed[0] ?? [], table.header);
}

export function numericColumn(table: Table, name: string): number[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new HeaderMismatchError(table.path, [name], table.header);
  }
  return table.rows.map((row, i) => {
    const value = Number(row[idx]);
    if (!Number.isFinite(value)) {
      throw new Error(`${table.path}:${i + 2}: non-numeric ${name} ${row[idx]}`);
    }
    return value;
  });
}

export function stringColumn(table: Table, name: string): string[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new HeaderMismatchError(table.path, [name], table.header);
  }
  return table.rows.map((row) => row[idx] ?? "");
}
