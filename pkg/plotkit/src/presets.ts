/** Preset plot layouts mirroring the simulator's scenario presets: which CSV
 * files each figure-style panel consumes and what it plots. */

import { existsSync } from "node:fs";
import { join } from "node:path";

import { PlotSpec } from "./render.js";

function seriesSpec(name: string, files: string[], column: string, title: string,
                    inDir: string, outDir: string, yLabel?: string): PlotSpec {
  return {
    kind: "time-series",
    inputs: files.map((f) => join(inDir, f)),
    column,
    title,
    xLabel: "damping-rate time",
    yLabel: yLabel ?? column,
    output: join(outDir, `${name}.svg`),
  };
}

export function presetSpecs(name: string, inDir: string, outDir: string): PlotSpec[] {
  switch (name) {
    case "fig2a":
      return [{
        kind: "surface",
        input: join(inDir, "fig2a.csv"),
        title: "final target fidelity over (flip angle, drive)",
        xLabel: "flip angle",
        yLabel: "drive",
        output: join(outDir, "fig2a.svg"),
      }];
    case "fig2c":
      return [seriesSpec("fig2c", ["fig2c-blockade.csv", "fig2c-noblockade.csv"],
                         "pop_target", "blockade speedup of target population",
                         inDir, outDir, "target population")];
    case "fig2c-strong":
      return [seriesSpec("fig2c-strong",
                         ["fig2c-strong-blockade.csv", "fig2c-strong-noblockade.csv"],
                         "pop_target", "blockade speedup, strong drive",
                         inDir, outDir, "target population")];
    case "fig2d": {
      const files = ["fig2d-theta1-8pi-eta1.csv", "fig2d-theta1-8pi-eta0.5.csv",
                     "fig2d-theta1-4pi-eta1.csv", "fig2d-theta1-4pi-eta0.5.csv",
                     "fig2d-theta3-8pi-eta1.csv", "fig2d-theta3-8pi-eta0.5.csv"];
      return [seriesSpec("fig2d", files, "fidelity",
                         "detector efficiency and adjustable targets",
                         inDir, outDir)];
    }
    case "fig3":
      return [seriesSpec("fig3", ["fig3-dfs-fb.csv", "fig3-dfs-nofb.csv",
                                  "fig3-w-fb.csv", "fig3-w-nofb.csv"],
                         "pop_target", "tripartite stabilization",
                         inDir, outDir, "target population")];
    case "fig4":
      return [seriesSpec("fig4", ["fig4-dfs-fock2.csv", "fig4-dfs-fock5.csv",
                                  "fig4-w-fock2.csv", "fig4-w-fock5.csv"],
                         "fidelity", "four-atom targets vs photon truncation",
                         inDir, outDir)];
    case "fig5a":
      return [seriesSpec("fig5a", ["fig5a-blockade-nostark.csv", "fig5a-blockade-stark.csv",
                                   "fig5a-noblockade-nostark.csv", "fig5a-noblockade-stark.csv"],
                         "fidelity", "level shifts and blockade", inDir, outDir)];
    case "fig5b":
      return [seriesSpec("fig5b", ["fig5b-dfs-nostark.csv", "fig5b-dfs-stark.csv",
                                   "fig5b-w-nostark.csv", "fig5b-w-stark.csv"],
                         "fidelity", "tripartite targets under level shifts",
                         inDir, outDir)];
    case "fig5c":
      return [seriesSpec("fig5c", ["fig5c-n2.csv", "fig5c-n3.csv"],
                         "pop_target", "cascade model with atomic decay",
                         inDir, outDir, "target population")];
    case "fig5d":
      return [seriesSpec("fig5d", ["fig5d-n2.csv", "fig5d-n3.csv"],
                         "fidelity", "experimental-parameter stabilization",
                         inDir, outDir)];
    default:
      throw new Error(`unknown preset ${name}`);
  }
}

/** Presets whose input files all exist under inDir. */
export function availablePresets(inDir: string, outDir: string): string[] {
  const names = ["fig2a", "fig2c", "fig2c-strong", "fig2d", "fig3", "fig4",
                 "fig5a", "fig5b", "fig5c", "fig5d"];
  return names.filter((name) =>
    presetSpecs(name, inDir, outDir).every((spec) =>
      (spec.kind === "surface" ? [spec.input] : spec.inputs).every(existsSync)));
}
