#!/usr/bin/env node
/**
 * plot --in results.csv --metric ber|pep|sum_rate --out figure.svg [--linear]
 *
 * Reads the simulator's results CSV and writes one SVG curve per
 * (scheme, Z) group. ber and pep default to a logarithmic y axis,
 * sum_rate to linear; --linear forces a linear axis.
 */
import { readFileSync, realpathSync, writeFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { buildFigure, defaultLogScale, Metric } from "./figure.js";
import { EmptyInputError, parseResultsCsv, SchemaError } from "./schema.js";
import { renderSvg } from "./svg.js";

export function renderFile(input: string, metric: Metric, output: string, linear: boolean): void {
  if (output.toLowerCase().endsWith(".png")) {
    throw new Error(
      "this build renders vector output only; use a .svg output path (no raster backend available)",
    );
  }
  const rows = parseResultsCsv(readFileSync(input, "utf-8"));
  const figure = buildFigure(rows, metric, linear ? false : defaultLogScale(metric));
  writeFileSync(output, renderSvg(figure), "utf-8");
}

export function main(argv: string[]): number {
  const args = yargs(argv)
    .usage("plot --in <results.csv> --metric <ber|pep|sum_rate> --out <figure.svg> [--linear]")
    .option("in", { type: "string", demandOption: true, describe: "simulator results CSV" })
    .option("metric", {
      choices: ["ber", "pep", "sum_rate"] as const,
      demandOption: true,
      describe: "column family to plot",
    })
    .option("out", { type: "string", demandOption: true, describe: "output SVG path" })
    .option("linear", { type: "boolean", default: false, describe: "force a linear y axis" })
    .strict()
    .exitProcess(false)
    .fail((msg) => {
      throw new UsageError(msg);
    })
    .parseSync();

  renderFile(args.in, args.metric as Metric, args.out, args.linear);
  console.log(`wrote ${args.out}`);
  return 0;
}

export class UsageError extends Error {}

const invokedDirectly = (() => {
  if (process.argv[1] === undefined) {
    return false;
  }
  try {
    // realpath so the npm bin symlink still counts as direct invocation
    return realpathSync(process.argv[1]) === fileURLToPath(import.meta.url);
  } catch {
    return false;
  }
})();

if (invokedDirectly) {
  try {
    process.exit(main(hideBin(process.argv)));
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`usage error: ${(err as Error).message}`);
      process.exit(2);
    }
    const kind =
      err instanceof SchemaError ? "schema error" :
      err instanceof EmptyInputError ? "empty input" : "error";
    console.error(`${kind}: ${(err as Error).message}`);
    process.exit(1);
  }
}
