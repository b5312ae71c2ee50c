export { AGGREGATE_HEADER, CsvFormatError, parseAggregateCsv, readAggregateCsv } from "./csv.js";
export type { AggregateRow } from "./csv.js";
export { EmptyFilterError, buildChartData, renderChartSvg } from "./chart.js";
export type { ChartDatum } from "./chart.js";
export { renderAccuracyChart, renderChart, renderMseChart } from "./render.js";
export type { PlotSpec, RenderResult } from "./render.js";
