#!/usr/bin/env node
/** plot <spec.json> | plot --preset fig2c --in DIR --out DIR */

import { readFileSync } from "node:fs";
import { exit } from "node:process";

import { CsvError } from "./csv.js";
import { presetSpecs } from "./presets.js";
import { PlotSpec, render } from "./render.js";

function usage(): never {
  console.error("usage: plotkit plot <spec.json>");
  console.error("       plotkit plot --preset <name> --in DIR [--out DIR]");
  exit(1);
}

export function main(argv: string[]): number {
  const args = [...argv];
  if (args[0] === "plot") args.shift();
  if (args.length === 0) usage();

  let specs: PlotSpec[];
  if (args[0] === "--preset") {
    const preset = args[1];
    const inIdx = args.indexOf("--in");
    const outIdx = args.indexOf("--out");
    if (!preset || inIdx < 0 || !args[inIdx + 1]) usage();
    const inDir = args[inIdx + 1];
    const outDir = outIdx >= 0 && args[outIdx + 1] ? args[outIdx + 1] : inDir;
    specs = presetSpecs(preset, inDir, outDir);
  } else {
    const doc = JSON.parse(readFileSync(args[0], "utf8"));
    specs = Array.isArray(doc) ? doc : [doc];
  }

  for (const spec of specs) {
    try {
      const out = render(spec);
      console.log(`wrote ${out}`);
    } catch (err) {
      if (err instanceof CsvError) {
        console.error(`malformed CSV: ${err.message}`);
        return 1;
      }
      if (err instanceof Error && "code" in err && err.code === "ENOENT") {
        console.error(`missing input: ${err.message}`);
        return 1;
      }
      throw err;
    }
  }
  return 0;
}

const invokedDirectly = process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  exit(main(process.argv.slice(2)));
}
