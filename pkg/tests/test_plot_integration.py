"""End-to-end check of the plot layer against real scenario output: the
rendered SVG must exist and re-rendering must be byte-identical."""

import shutil
import subprocess
from pathlib import Path

import pytest

import rydstab.cli as cli

PLOTKIT = Path(__file__).resolve().parent.parent / "plotkit"


def plotkit_cli():
    entry = PLOTKIT / "dist" / "cli.js"
    node = shutil.which("node")
    if node is None or not entry.exists():
        pytest.skip("plot layer not built (run `npm run build` in plotkit/)")
    return [node, str(entry)]


@pytest.mark.parametrize("preset,kind", [("fig2c", "run"), ("fig3", "run"),
                                         ("fig2a", "sweep")])
def test_preset_output_renders_idempotently(tmp_path, preset, kind):
    base = plotkit_cli()
    assert cli.main(["--out", str(tmp_path), kind, preset]) == 0
    svg = tmp_path / f"{preset}.svg"
    for _ in range(2):
        proc = subprocess.run(
            base + ["plot", "--preset", preset, "--in", str(tmp_path)],
            capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        if _ == 0:
            first = svg.read_bytes()
    assert svg.read_bytes() == first
    assert b"</svg>" in first


def test_malformed_csv_exits_nonzero(tmp_path):
    base = plotkit_cli()
    (tmp_path / "fig2c-blockade.csv").write_text("time,pop_target\n0,oops\n")
    (tmp_path / "fig2c-noblockade.csv").write_text("time,pop_target\n0,1\n1,1\n")
    proc = subprocess.run(
        base + ["plot", "--preset", "fig2c", "--in", str(tmp_path)],
        capture_output=True, text=True)
    assert proc.returncode == 1
    assert "pop_target" in proc.stderr or "not a finite number" in proc.stderr