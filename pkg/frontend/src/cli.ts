#!/usr/bin/env node
/**
 * plotkit <transient|rmse> --in PATH [--in PATH ...] --out PATH
 *
 * transient: percentile-band figure from one or more summary CSVs
 *            (schema t,symmetry,p05,p50,p95), time clipped to [0, pi/2]
 * rmse:      bar figure from an RMSE CSV (schema symmetry,p20,p50,p80)
 *
 * Multiple --in files are concatenated row-wise before grouping, so
 * per-symmetry files from separate runs can share one figure.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";

import { CsvError, readRmse, readSummary } from "./csv.js";
import { rmseLayout, transientLayout } from "./layout.js";
import { encodePng } from "./png.js";
import { renderRmse, renderTransient } from "./render.js";

const USAGE = "usage: plotkit <transient|rmse> --in PATH [--in PATH ...] --out PATH";

export function run(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        in: { type: "string", multiple: true },
        out: { type: "string" },
      },
    });
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    console.error(USAGE);
    return 2;
  }

  const kind = parsed.positionals[0];
  const inputs = parsed.values.in ?? [];
  const out = parsed.values.out;
  if (parsed.positionals.length !== 1 || inputs.length === 0 || !out) {
    console.error(USAGE);
    return 2;
  }

  try {
    const texts = inputs.map((p) => ({ path: p, text: readFileSync(p, "utf-8") }));
    let png: Uint8Array;
    if (kind === "transient") {
      const rows = texts.flatMap((f) => readSummary(f.text, f.path));
      png = encodePng(renderTransient(transientLayout(rows)));
    } else if (kind === "rmse") {
      const rows = texts.flatMap((f) => readRmse(f.text, f.path));
      png = encodePng(renderRmse(rmseLayout(rows)));
    } else {
      console.error(`unknown figure kind '${kind}'`);
      console.error(USAGE);
      return 2;
    }
    writeFileSync(out, png);
    console.log(`wrote ${out}`);
    return 0;
  } catch (err) {
    if (err instanceof CsvError || err instanceof Error) {
      console.error(`plotkit: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

if (process.argv[1] && pathToFileURL(process.argv[1]).href === import.meta.url) {
  process.exit(run(process.argv.slice(2)));
}
