/**
 * Reading the aggregate result CSVs produced by the kernelrep harness.
 *
 * Schema (exact header): dataset,method,kernel,metric_name,mean,sd,n_seeds
 */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export const AGGREGATE_HEADER = [
  "dataset",
  "method",
  "kernel",
  "metric_name",
  "mean",
  "sd",
  "n_seeds",
] as const;

export interface AggregateRow {
  dataset: string;
  method: string;
  kernel: string;
  metric_name: string;
  mean: number;
  sd: number;
  n_seeds: number;
}

export class CsvFormatError extends Error {}

export function parseAggregateCsv(text: string): AggregateRow[] {
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new CsvFormatError(`CSV parse error at row ${first.row}: ${first.message}`);
  }
  const rows = parsed.data;
  if (rows.length === 0) {
    throw new CsvFormatError("empty CSV");
  }
  const header = rows[0];
  if (header.join(",") !== AGGREGATE_HEADER.join(",")) {
    throw new CsvFormatError(
      `unexpected header ${JSON.stringify(header)}; expected ${AGGREGATE_HEADER.join(",")}`,
    );
  }
  return rows.slice(1).map((cells, i) => {
    if (cells.length !== AGGREGATE_HEADER.length) {
      throw new CsvFormatError(`row ${i + 1} has ${cells.length} fields, expected 7`);
    }
    const mean = Number(cells[4]);
    const sd = Number(cells[5]);
    const nSeeds = Number(cells[6]);
    if (!Number.isFinite(mean) || !Number.isFinite(sd) || !Number.isFinite(nSeeds)) {
      throw new CsvFormatError(`row ${i + 1} has non-numeric mean/sd/n_seeds`);
    }
    return {
      dataset: cells[0],
      method: cells[1],
      kernel: cells[2],
      metric_name: cells[3],
      mean,
      sd,
      n_seeds: nSeeds,
    };
  });
}

export function readAggregateCsv(path: string): AggregateRow[] {
  return parseAggregateCsv(readFileSync(path, "utf8"));
}
