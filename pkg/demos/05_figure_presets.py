"""Drive the scenario layer end to end: run a figure preset through the same
code path as the CLI, write the CSV/JSON artifacts, and hand them to the
plot layer.

Run:  python3 demos/05_figure_presets.py   (a few seconds)
Then: cd plotkit && npm run build && node dist/cli.js plot --preset fig2c --in ../demo-out
"""

import json
from pathlib import Path

import rydstab.scenarios as sc

outdir = Path("demo-out")
outdir.mkdir(exist_ok=True)

for config in sc.PRESETS["fig2c"]():
    series, summary = sc.run_scenario(config)
    sc.write_csv(outdir / f"{config.name}.csv", series)
    sc.write_summary(outdir / f"{config.name}.summary.json", summary)
    print(f"{config.name}: final target population "
          f"{series.records['pop_target'][-1]:.5f} "
          f"({summary.wall_time_s:.2f}s, max drift {summary.max_trace_drift:.1e})")

# the steady-state verification report the CLI writes with `rydstab verify`
report = sc.run_verification(n_values=(2, 3, 4))
(outdir / "verification.json").write_text(json.dumps(report, indent=2, sort_keys=True))
print(f"verification over n=2..4: {'PASS' if report['pass'] else 'FAIL'}")
print(f"artifacts in {outdir}/")
