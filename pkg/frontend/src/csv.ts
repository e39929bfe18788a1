/**
 * Minimal CSV reading for the torusfc report files: comma-separated,
 * header row mandatory, plain numeric cells, no quoting.
 */

import { readFileSync } from "fs";

export interface Table {
  header: string[];
  rows: number[][];
}

/** Published column schemas of the torusfc CLI reports. */
export const SCHEMAS: Record<string, string[]> = {
  decay: [
    "lambda_modulus",
    "residual_norm",
    "resolvent_norm",
    "product",
    "slope_estimate",
  ],
  convergence: ["nodes_per_ray", "nodes_on_circle", "error_vs_spectral"],
  heat_orders: [
    "t",
    "operator_trace",
    "symbol_leading",
    "symbol_corrected",
    "discrepancy_leading",
    "discrepancy_corrected",
  ],
  zeta_overlay: ["z_re", "z_im", "operator_zeta", "contour_zeta", "symbol_zeta"],
};

export class SchemaError extends Error {}

export function parseCsv(text: string): Table {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("CSV is empty (no header row)");
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const rows: number[][] = [];
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new SchemaError(
        `row has ${cells.length} cells, header has ${header.length}`,
      );
    }
    rows.push(
      cells.map((c) => {
        const v = Number(c);
        if (!Number.isFinite(v)) {
          throw new SchemaError(`non-numeric cell ${JSON.stringify(c)}`);
        }
        return v;
      }),
    );
  }
  return { header, rows };
}

export function readTable(path: string, kind: string): Table {
  const expected = SCHEMAS[kind];
  if (!expected) {
    throw new SchemaError(`unknown plot kind ${JSON.stringify(kind)}`);
  }
  const table = parseCsv(readFileSync(path, "utf8"));
  if (table.header.length !== expected.length) {
    throw new SchemaError(
      `expected ${expected.length} columns for ${kind}, got ${table.header.length}`,
    );
  }
  for (let i = 0; i < expected.length; i++) {
    if (table.header[i] !== expected[i]) {
      throw new SchemaError(
        `column ${i}: expected ${JSON.stringify(expected[i])}, got ${JSON.stringify(table.header[i])}`,
      );
    }
  }
  if (table.rows.length === 0) {
    throw new SchemaError("CSV has a header but no data rows");
  }
  return table;
}

export function column(table: Table, name: string): number[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(`no column ${JSON.stringify(name)}`);
  }
  return table.rows.map((r) => r[idx]);
}
