/** PlotSpec evaluation: read scenario CSV files, render time-series or
 * surface SVGs. Pure file-to-file; inputs are never modified and identical
 * inputs give identical output bytes. */

import { readFileSync, writeFileSync } from "node:fs";
import { basename } from "node:path";

import { CsvError, parseCsv, parseSweepCsv, requireColumn } from "./csv.js";
import { Series, SurfacePanel, lineChart, surfaceChart } from "./svg.js";

export interface TimeSeriesSpec {
  kind: "time-series";
  inputs: string[]; // CSV paths, one curve group per file
  column: string; // observable column to plot
  title: string;
  xLabel: string;
  yLabel: string;
  output: string;
}

export interface SurfaceSpec {
  kind: "surface";
  input: string; // long-format sweep CSV
  title: string;
  xLabel: string;
  yLabel: string;
  output: string;
}

export type PlotSpec = TimeSeriesSpec | SurfaceSpec;

export function renderTimeSeries(spec: TimeSeriesSpec): string {
  const series: Series[] = spec.inputs.map((path) => {
    const table = parseCsv(readFileSync(path, "utf8"));
    return {
      label: basename(path).replace(/\.csv$/, ""),
      x: requireColumn(table, "time"),
      y: requireColumn(table, spec.column),
    };
  });
  const svg = lineChart(series, spec.title, spec.xLabel, spec.yLabel);
  writeFileSync(spec.output, svg);
  return spec.output;
}

export function renderSurface(spec: SurfaceSpec): string {
  const text = readFileSync(spec.input, "utf8");
  const { columns, numeric, labels } = parseSweepCsv(text, "tier");
  const [ax1, ax2] = columns.filter((c) => c !== "tier" && c !== "fidelity");
  if (ax1 === undefined || ax2 === undefined) {
    throw new CsvError("sweep CSV needs two axis columns beside tier and fidelity", 0, 0);
  }
  const fidelity = numeric.get("fidelity");
  if (fidelity === undefined) throw new CsvError("missing column fidelity", 0, "fidelity");
  const v1 = numeric.get(ax1)!;
  const v2 = numeric.get(ax2)!;
  const tiers = [...new Set(labels)].sort();
  const xs = [...new Set(v1)].sort((a, b) => a - b);
  const ys = [...new Set(v2)].sort((a, b) => a - b);
  const panels: SurfacePanel[] = tiers.map((tier) => {
    const z = new Map<string, number>();
    labels.forEach((label, r) => {
      if (label !== tier) return;
      z.set(`${xs.indexOf(v1[r])}|${ys.indexOf(v2[r])}`, fidelity[r]);
    });
    return { label: tier, x: xs, y: ys, z };
  });
  const svg = surfaceChart(panels, spec.title, spec.xLabel, spec.yLabel);
  writeFileSync(spec.output, svg);
  return spec.output;
}

export function render(spec: PlotSpec): string {
  if (spec.kind === "time-series") return renderTimeSeries(spec);
  if (spec.kind === "surface") return renderSurface(spec);
  throw new Error(`unknown plot kind ${(spec as { kind: string }).kind}`);
}
