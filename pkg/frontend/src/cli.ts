#!/usr/bin/env node
/**
 * torusfc-plots render --kind K --in report.csv --out fig.svg
 *
 * Kinds: decay | convergence | heat_orders | zeta_overlay.  Input CSV
 * headers must match the torusfc CLI's published schemas exactly; errors
 * leave no partial output behind.
 */

import { existsSync } from "fs";

import { SchemaError } from "./csv.js";
import { PlotJob, render } from "./plots.js";

function parseArgs(argv: string[]): PlotJob {
  if (argv[0] !== "render") {
    throw new SchemaError(`unknown command ${JSON.stringify(argv[0])}; use "render"`);
  }
  const opts: Record<string, string> = {};
  for (let i = 1; i < argv.length; i += 2) {
    const key = argv[i];
    const val = argv[i + 1];
    if (val === undefined) throw new SchemaError(`missing value for ${key}`);
    if (key === "--kind") opts.kind = val;
    else if (key === "--in") opts.input = val;
    else if (key === "--out") opts.output = val;
    else throw new SchemaError(`unknown flag ${key}`);
  }
  for (const req of ["kind", "input", "output"]) {
    if (!opts[req]) throw new SchemaError(`--${req === "input" ? "in" : req === "output" ? "out" : req} is required`);
  }
  return opts as unknown as PlotJob;
}

export function main(argv: string[]): number {
  let job: PlotJob;
  try {
    job = parseArgs(argv);
    if (!existsSync(job.input)) {
      throw new SchemaError(`input file not found: ${job.input}`);
    }
    const res = render(job);
    const slopeNote = Object.entries(res.slopes)
      .map(([k, v]) => `${k}=${v.toPrecision(8)}`)
      .join(", ");
    console.log(`wrote ${res.output}${slopeNote ? ` (${slopeNote})` : ""}`);
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() as string);
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
