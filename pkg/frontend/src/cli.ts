#!/usr/bin/env node
/**
 * kernelrep-plot plot --in <aggregate.csv> --metric accuracy --out <file>
 *
 * Reads the aggregate CSV written by the kernelrep harness and writes one
 * SVG and one PNG grouped bar chart (means with sd error bars; the baseline
 * method's group is drawn first and highlighted). --echo prints the exact
 * (group, bar, mean, sd) tuples that were plotted as JSON, for test-mode
 * verification against the CSV contents.
 */

import { pathToFileURL } from "node:url";

import { EmptyFilterError } from "./chart.js";
import { CsvFormatError } from "./csv.js";
import { renderChart } from "./render.js";

const USAGE =
  "usage: kernelrep-plot plot --in <aggregate.csv> --metric <name> --out <file> " +
  "[--title <text>] [--baseline <method>] [--echo]";

interface Args {
  input: string;
  metric: string;
  output: string;
  title?: string;
  baseline?: string;
  echo: boolean;
}

export function parseArgs(argv: string[]): Args {
  if (argv[0] !== "plot") {
    throw new Error(`unknown command ${JSON.stringify(argv[0] ?? "")}; ${USAGE}`);
  }
  const out: Partial<Args> = { echo: false };
  for (let i = 1; i < argv.length; i++) {
    const flag = argv[i];
    const need = () => {
      const v = argv[++i];
      if (v === undefined) throw new Error(`missing value for ${flag}; ${USAGE}`);
      return v;
    };
    switch (flag) {
      case "--in":
        out.input = need();
        break;
      case "--metric":
        out.metric = need();
        break;
      case "--out":
        out.output = need();
        break;
      case "--title":
        out.title = need();
        break;
      case "--baseline":
        out.baseline = need();
        break;
      case "--echo":
        out.echo = true;
        break;
      default:
        throw new Error(`unknown flag ${flag}; ${USAGE}`);
    }
  }
  for (const key of ["input", "metric", "output"] as const) {
    if (out[key] === undefined) {
      throw new Error(`--${key === "input" ? "in" : key === "output" ? "out" : key} is required; ${USAGE}`);
    }
  }
  return out as Args;
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
  try {
    const result = renderChart(args);
    if (args.echo) {
      console.log(JSON.stringify(result.data));
    } else {
      console.error(`wrote ${result.svgPath} and ${result.pngPath}`);
    }
    return 0;
  } catch (err) {
    if (err instanceof EmptyFilterError || err instanceof CsvFormatError) {
      console.error(err.message);
      return 1;
    }
    if (err instanceof Error && "code" in err && err.code === "ENOENT") {
      console.error(`cannot read input: ${err.message}`);
      return 1;
    }
    console.error(String(err instanceof Error ? (err.stack ?? err.message) : err));
    return 2;
  }
}

const invokedDirectly =
  typeof process.argv[1] === "string" &&
  import.meta.url === pathToFileURL(process.argv[1]).href;

if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
