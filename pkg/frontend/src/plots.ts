/**
 * The four report figures: resolvent decay, quadrature convergence,
 * heat-trace error orders, and zeta cross-method overlay.  Decay and heat
 * figures re-fit the log-log slopes from the CSV data and annotate them;
 * the fits are the independent cross-check against the primary's JSON.
 */

import { writeFileSync } from "fs";

import { column, readTable, SchemaError, Table } from "./csv.js";
import { fitLogLogSlope } from "./fit.js";
import { renderChart, Series } from "./svg.js";

export interface PlotJob {
  kind: "decay" | "convergence" | "heat_orders" | "zeta_overlay";
  input: string;
  output: string;
}

export interface RenderResult {
  output: string;
  slopes: Record<string, number>;
}

function decayFigure(t: Table): { svg: string; slopes: Record<string, number> } {
  const mod = column(t, "lambda_modulus");
  const res = column(t, "residual_norm");
  const prod = column(t, "product");
  const slope = fitLogLogSlope(mod, res);
  const svg = renderChart(
    [
      { label: "residual norm", x: mod, y: res, color: "#1f77b4" },
      { label: "r ||(A+r)^-1||", x: mod, y: prod, color: "#d62728", dashed: true },
    ],
    {
      title: "Parametrix residual decay along the ray",
      xLabel: "|lambda|",
      yLabel: "operator norm",
      logX: true,
      logY: true,
      annotations: [`fitted slope = ${slope.toFixed(6)}`],
    },
  );
  return { svg, slopes: { residual: slope } };
}

function convergenceFigure(t: Table): { svg: string; slopes: Record<string, number> } {
  const nodes = column(t, "nodes_per_ray");
  const err = column(t, "error_vs_spectral");
  const slope = fitLogLogSlope(nodes, err);
  const svg = renderChart(
    [{ label: "contour vs oracle", x: nodes, y: err, color: "#2ca02c" }],
    {
      title: "Quadrature convergence",
      xLabel: "nodes per ray",
      yLabel: "relative error",
      logX: true,
      logY: true,
      annotations: [`fitted slope = ${slope.toFixed(3)}`],
    },
  );
  return { svg, slopes: { convergence: slope } };
}

function heatFigure(t: Table): { svg: string; slopes: Record<string, number> } {
  const ts = column(t, "t");
  const dLead = column(t, "discrepancy_leading");
  const dCorr = column(t, "discrepancy_corrected");
  const sLead = fitLogLogSlope(ts, dLead);
  const sCorr = fitLogLogSlope(ts, dCorr);
  const svg = renderChart(
    [
      { label: "leading term", x: ts, y: dLead, color: "#1f77b4" },
      { label: "with k=1 correction", x: ts, y: dCorr, color: "#d62728" },
    ],
    {
      title: "Heat-trace discrepancy vs t",
      xLabel: "t",
      yLabel: "|operator - symbol|",
      logX: true,
      logY: true,
      annotations: [
        `leading order = ${sLead.toFixed(6)}`,
        `corrected order = ${sCorr.toFixed(6)}`,
      ],
    },
  );
  return { svg, slopes: { leading: sLead, corrected: sCorr } };
}

function zetaFigure(t: Table): { svg: string; slopes: Record<string, number> } {
  const z = column(t, "z_re");
  const series: Series[] = [
    { label: "eigenvalue sum", x: z, y: column(t, "operator_zeta"), color: "#1f77b4" },
    { label: "contour trace", x: z, y: column(t, "contour_zeta"), color: "#d62728", dashed: true },
    { label: "symbol formula", x: z, y: column(t, "symbol_zeta"), color: "#2ca02c", dashed: true },
  ];
  const svg = renderChart(series, {
    title: "Spectral zeta: three evaluation paths",
    xLabel: "Re z",
    yLabel: "zeta(A, -z)",
    logX: false,
    logY: false,
  });
  return { svg, slopes: {} };
}

export function render(job: PlotJob): RenderResult {
  if (!job.output.endsWith(".svg")) {
    throw new SchemaError(
      "output must be an .svg path (vector output; no raster backend here)",
    );
  }
  const table = readTable(job.input, job.kind);
  let made: { svg: string; slopes: Record<string, number> };
  switch (job.kind) {
    case "decay":
      made = decayFigure(table);
      break;
    case "convergence":
      made = convergenceFigure(table);
      break;
    case "heat_orders":
      made = heatFigure(table);
      break;
    case "zeta_overlay":
      made = zetaFigure(table);
      break;
  }
  writeFileSync(job.output, made.svg);
  return { output: job.output, slopes: made.slopes };
}
