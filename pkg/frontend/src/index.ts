export { fitLogLogSlope } from "./fit.js";
export { parseCsv, readTable, column, SCHEMAS, SchemaError } from "./csv.js";
export { render } from "./plots.js";
export type { PlotJob, RenderResult } from "./plots.js";
export { renderChart } from "./svg.js";
export type { Series, ChartOptions } from "./svg.js";
