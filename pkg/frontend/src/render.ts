/**
 * File-producing entry points: each chart is written as one vector (.svg)
 * and one raster (.png) variant, plus an optional test-mode echo of the
 * exact tuples that were plotted.
 */

import { writeFileSync } from "node:fs";
import { Resvg } from "@resvg/resvg-js";

import { buildChartData, renderChartSvg, type ChartDatum } from "./chart.js";
import { readAggregateCsv } from "./csv.js";

export interface PlotSpec {
  input: string;
  metric: string;
  output: string;
  title?: string;
  baseline?: string;
}

export interface RenderResult {
  svgPath: string;
  pngPath: string;
  data: ChartDatum[];
}

function outputPaths(output: string): { svgPath: string; pngPath: string } {
  const stem = output.replace(/\.(svg|png)$/i, "");
  return { svgPath: `${stem}.svg`, pngPath: `${stem}.png` };
}

export function renderChart(spec: PlotSpec): RenderResult {
  const baseline = spec.baseline ?? "raw";
  const rows = readAggregateCsv(spec.input);
  const data = buildChartData(rows, spec.metric, baseline);
  const svg = renderChartSvg(data, {
    title: spec.title ?? `${spec.metric} by method and kernel`,
    metricLabel: spec.metric,
    baseline,
  });
  const { svgPath, pngPath } = outputPaths(spec.output);
  writeFileSync(svgPath, svg, "utf8");
  const png = new Resvg(svg, { fitTo: { mode: "zoom", value: 2 } }).render().asPng();
  writeFileSync(pngPath, png);
  return { svgPath, pngPath, data };
}

export function renderAccuracyChart(spec: Omit<PlotSpec, "metric">): RenderResult {
  return renderChart({ ...spec, metric: "accuracy" });
}

export function renderMseChart(spec: Omit<PlotSpec, "metric">): RenderResult {
  return renderChart({ ...spec, metric: "mse" });
}
