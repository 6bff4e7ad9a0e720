"""Command-line entry point: run figure presets or custom configs, emit CSV
time series and JSON summaries, run the steady-state verification report,
and execute two-parameter sweeps."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .evolve import IntegrationError, TimeGrid
from .model import ModelTier, PhysicalParams
from .scenarios import (
    PRESETS,
    SWEEP_PRESETS,
    ScenarioConfig,
    run_scenario,
    run_verification,
    sweep,
    write_csv,
    write_summary,
    write_sweep_csv,
)
from .states import TargetKind


def _expand_configs(source: str, overrides: dict) -> list[ScenarioConfig]:
    if source in PRESETS:
        configs = PRESETS[source]()
    else:
        path = Path(source)
        if not path.exists():
            raise SystemExit(f"unknown preset or missing config file: {source}")
        doc = json.loads(path.read_text())
        preset = doc.pop("preset", None)
        if preset is not None:
            if preset not in PRESETS:
                raise SystemExit(f"unknown preset {preset!r} in {source}")
            configs = PRESETS[preset]()
            overrides = {**doc, **overrides}
        else:
            configs = [_config_from_dict(doc)]
    return [_apply_overrides(c, overrides) for c in configs]


def _config_from_dict(doc: dict) -> ScenarioConfig:
    params = PhysicalParams(**doc["params"])
    grid = TimeGrid(**doc["grid"])
    return ScenarioConfig(
        name=doc["name"],
        tier=ModelTier(doc["tier"]),
        params=params,
        grid=grid,
        target_kind=TargetKind(doc.get("target_kind", "bell_antisym")),
        target_theta=doc.get("target_theta"),
        outputs=tuple(doc.get("outputs", ("fidelity", "pop_target", "pop_ground"))),
        master_seed=doc.get("master_seed", 0),
        slow=doc.get("slow", False),
    )


def _apply_overrides(config: ScenarioConfig, overrides: dict) -> ScenarioConfig:
    if not overrides:
        return config
    cfg_fields = {f.name for f in dataclasses.fields(ScenarioConfig)}
    param_fields = {f.name for f in dataclasses.fields(PhysicalParams)}
    cfg_kwargs = {}
    params = config.params
    for key, value in overrides.items():
        if key == "fock_dim":
            params = dataclasses.replace(params, fock_dim=int(value))
        elif key in param_fields:
            params = dataclasses.replace(params, **{key: value})
        elif key in cfg_fields:
            cfg_kwargs[key] = value
        else:
            raise SystemExit(f"unknown override {key!r}")
    return dataclasses.replace(config, params=params, **cfg_kwargs)


def _parse_n_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(tok) for tok in text.split(",")]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rydstab",
        description="feedback-stabilized Rydberg entanglement scenarios")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=0, help="master random seed")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--fock-dim", type=int, default=None,
                        help="override the cavity truncation")
    parser.add_argument("--slow", action="store_true",
                        help="enable the long experimental-parameter runs")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a preset or a JSON config")
    p_run.add_argument("scenario", help="preset name or config.json path")

    p_verify = sub.add_parser("verify", help="steady-state verification report")
    p_verify.add_argument("--n", default="2..8", help="atom-number range, e.g. 2..8")

    p_sweep = sub.add_parser("sweep", help="two-parameter fidelity sweep")
    p_sweep.add_argument("preset", choices=sorted(SWEEP_PRESETS))

    args = parser.parse_args(argv)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    if args.command == "run":
        overrides = {"master_seed": args.seed}
        if args.fock_dim is not None:
            overrides["fock_dim"] = args.fock_dim
        configs = _expand_configs(args.scenario, overrides)
        to_run = []
        for config in configs:
            if config.slow and not args.slow:
                print(f"skip {config.name} (slow; rerun with --slow)")
            else:
                to_run.append(config)
        try:
            if args.threads > 1 and len(to_run) > 1:
                from concurrent.futures import ProcessPoolExecutor

                with ProcessPoolExecutor(max_workers=args.threads) as pool:
                    results = list(pool.map(run_scenario, to_run))
            else:
                results = [run_scenario(c) for c in to_run]
        except IntegrationError as err:
            diag = {"scenario": args.scenario, "error": str(err)}
            (outdir / "integration.error.json").write_text(
                json.dumps(diag, indent=2) + "\n")
            print(f"INTEGRATION ABORT: {err}", file=sys.stderr)
            return 2
        for config, (series, summary) in zip(to_run, results):
            write_csv(outdir / f"{config.name}.csv", series)
            write_summary(outdir / f"{config.name}.summary.json", summary)
            print(f"{config.name}: final fidelity {summary.final_fidelity:.6f} "
                  f"({summary.wall_time_s:.1f}s)")
        return 0

    if args.command == "verify":
        n_values = _parse_n_range(args.n)
        if any(not 2 <= n <= 8 for n in n_values):
            raise SystemExit("verification range covers n in 2..8")
        report = run_verification(n_values=n_values)
        path = outdir / "verification.json"
        path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
        status = "PASS" if report["pass"] else "FAIL"
        print(f"verification: {status} ({path})")
        return 0 if report["pass"] else 1

    if args.command == "sweep":
        spec = SWEEP_PRESETS[args.preset]()
        rows = sweep(spec, threads=args.threads)
        path = outdir / f"{spec.name}.csv"
        write_sweep_csv(path, spec, rows)
        print(f"{spec.name}: {len(rows)} grid points -> {path}")
        return 0

    return 1


if __name__ == "__main__":
    sys.exit(main())
