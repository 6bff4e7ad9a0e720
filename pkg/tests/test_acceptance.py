"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Long figure-scale reproductions carry the `slow` marker; run the whole suite
with plain `pytest` (nothing is deselected by default).
"""

import math

import numpy as np
import pytest

import rydstab.scenarios as sc
from rydstab.evolve import TimeGrid, evolve_rk4, trajectory_mean
from rydstab.liouville import assemble
from rydstab.model import ModelTier, ground_state, reduced_params
from rydstab.ops import DensityMatrix
from rydstab.states import population_mat, target_state
from rydstab.steady import verify_claimed_steady


def report(name: str, ok: bool, detail: str) -> bool:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return ok


def at_time(series, t):
    return int(np.searchsorted(series.times, t - 1e-9))


class TestAnalyticalSteadyState:
    def test_steady_state_verification_grid(self):
        """Criterion 1: closed-form residual zero and unique dark steady state
        for n in 2..8, flip angles {pi/6, pi/4, pi/2, 3pi/4}, drives
        {0.25, 1, 5} Gamma."""
        omegas = (math.pi / 6, math.pi / 4, math.pi / 2, 3 * math.pi / 4)
        drives = (0.25, 1.0, 5.0)
        worst_resid = 0.0
        worst_fid = 1.0
        all_unique = True
        for n in range(2, 9):
            rep = verify_claimed_steady(n, omegas, drives)
            for cell in rep["cells"]:
                worst_resid = max(worst_resid, cell["residual_max"])
                worst_fid = min(worst_fid, cell["dark_fidelity"])
                all_unique = all_unique and cell["unique"]
        ok = worst_resid <= 1e-14 and all_unique and worst_fid >= 1.0 - 1e-8
        assert report(
            "steady-state verification (n=2..8)",
            ok,
            f"max residual {worst_resid:.2e}, min dark fidelity {worst_fid:.10f}, "
            f"all unique={all_unique}",
        )


class TestBipartiteSweep:
    @pytest.fixture(scope="class")
    def sweep_table(self):
        rows = sc.sweep(sc.preset_fig2a_sweep())
        table = {}
        for omega, drive, tier, fid in rows:
            table.setdefault((round(omega, 12), round(drive, 12)), {})[tier] = fid
        return table

    def test_fig2a_plateau_fidelity(self, sweep_table):
        """Criterion 2a: both tiers reach fidelity >= 0.99 for flip angles in
        [0.2 pi, 0.8 pi] and drives >= 0.25 Gamma at t = 100/Gamma."""
        plateau_min = 1.0
        for (omega, drive), fids in sweep_table.items():
            if 0.2 * math.pi <= omega <= 0.8 * math.pi and drive >= 0.25:
                plateau_min = min(plateau_min, *fids.values())
        ok = plateau_min >= 0.99
        assert report("bipartite sweep plateau", ok,
                      f"min fidelity on the plateau {plateau_min:.4f}")

    def test_fig2a_pointwise_tier_agreement(self, sweep_table):
        """Criterion 2b: reduced vs cavity final fidelity within 0.01 at every
        grid point of the 11x11 sweep."""
        max_gap, where = 0.0, None
        for (omega, drive), fids in sweep_table.items():
            gap = abs(fids["feedback_reduced"] - fids["effective_cavity"])
            if gap > max_gap:
                max_gap, where = gap, (omega / math.pi, drive)
        ok = max_gap <= 0.01
        assert report(
            "bipartite sweep pointwise agreement", ok,
            f"max |F_reduced - F_cavity| = {max_gap:.4f} at "
            f"(omega, drive) = ({where[0]:.2f} pi, {where[1]:.2f})",
        )


class TestBlockadeSpeedup:
    def test_fig2c_weak_drive(self):
        """Criterion 3a: drive 2.5 Gamma; blockaded target population >= 0.99
        at t = 9/Gamma, unblockaded in [0.94, 0.98]."""
        runs = {c.name: sc.run_scenario(c)[0] for c in sc.PRESETS["fig2c"]()}
        blocked = runs["fig2c-blockade"]
        unblocked = runs["fig2c-noblockade"]
        p_b = blocked.records["pop_target"][at_time(blocked, 9.0)]
        p_u = unblocked.records["pop_target"][at_time(unblocked, 9.0)]
        ok_b = p_b >= 0.99
        ok_u = 0.94 <= p_u <= 0.98
        report("blockade speedup weak drive (blockaded)", ok_b,
               f"target population {p_b:.5f} at t=9 (need >= 0.99)")
        report("blockade speedup weak drive (unblockaded)", ok_u,
               f"target population {p_u:.5f} at t=9 (need within [0.94, 0.98])")
        assert ok_u
        assert ok_b

    def test_fig2c_strong_drive(self):
        """Criterion 3b: drive 10 Gamma; populations 0.9968 +/- 0.005 vs
        0.8491 +/- 0.01 at t = 16/Gamma."""
        runs = {c.name: sc.run_scenario(c)[0] for c in sc.PRESETS["fig2c-strong"]()}
        p_b = runs["fig2c-strong-blockade"].records["pop_target"][
            at_time(runs["fig2c-strong-blockade"], 16.0)]
        p_u = runs["fig2c-strong-noblockade"].records["pop_target"][
            at_time(runs["fig2c-strong-noblockade"], 16.0)]
        ok_b = abs(p_b - 0.9968) <= 0.005
        ok_u = abs(p_u - 0.8491) <= 0.01
        report("blockade speedup strong drive (blockaded)", ok_b,
               f"population {p_b:.5f} at t=16 (need 0.9968 +/- 0.005)")
        report("blockade speedup strong drive (unblockaded)", ok_u,
               f"population {p_u:.5f} at t=16 (need 0.8491 +/- 0.01)")
        assert ok_b
        assert ok_u


class TestDetectorInefficiency:
    def test_fig2d_eta_half_delays_but_converges(self):
        """Criterion 4: eta = 0.5 reaches the same late-time fidelity as
        eta = 1 (within 0.005) while crossing F = 0.95 strictly later."""
        configs = {c.name: c for c in sc.preset_fig2d()}
        ok_all = True
        details = []
        for theta_tag in ("theta1-8pi", "theta1-4pi", "theta3-8pi"):
            full = sc.run_scenario(configs[f"fig2d-{theta_tag}-eta1"])[0]
            half = sc.run_scenario(configs[f"fig2d-{theta_tag}-eta0.5"])[0]
            late_gap = abs(full.records["fidelity"][-1] - half.records["fidelity"][-1])
            t_full = full.times[np.argmax(full.records["fidelity"] >= 0.95)]
            t_half = half.times[np.argmax(half.records["fidelity"] >= 0.95)]
            ok = late_gap <= 0.005 and t_half > t_full
            ok_all = ok_all and ok
            details.append(f"{theta_tag}: gap {late_gap:.4f}, "
                           f"t95 {t_full:.1f} -> {t_half:.1f}")
        assert report("detector inefficiency", ok_all, "; ".join(details))


class TestTripartiteSwitching:
    def test_fig3_dfs_and_w_targets(self):
        """Criterion 5: equal couplings stabilize the three-atom dark state to
        population >= 0.98 by t = 30/Gamma; the -2:1:1 pattern stabilizes the
        W state likewise."""
        runs = {c.name: sc.run_scenario(c)[0] for c in sc.preset_fig3()
                if c.name.endswith("-fb")}
        p_dfs = runs["fig3-dfs-fb"].records["pop_target"][-1]
        p_w = runs["fig3-w-fb"].records["pop_target"][-1]
        ok = p_dfs >= 0.98 and p_w >= 0.98
        assert report("tripartite DFS/W switching", ok,
                      f"DFS population {p_dfs:.4f}, W population {p_w:.4f} at t=30")


@pytest.mark.slow
class TestFockTruncation:
    def test_fig4_truncation_robustness(self):
        """Criterion 6: four-atom dark/W fidelity curves with 2- and 5-photon
        truncations agree within 0.01 at every sampled time."""
        series = {c.name: sc.run_scenario(c)[0] for c in sc.preset_fig4()}
        ok_all = True
        details = []
        for target in ("dfs", "w"):
            a = series[f"fig4-{target}-fock2"]
            b = series[f"fig4-{target}-fock5"]
            assert np.allclose(a.times, b.times)
            gap = np.abs(a.records["fidelity"] - b.records["fidelity"]).max()
            final = b.records["fidelity"][-1]
            ok_all = ok_all and gap <= 0.01
            details.append(f"{target}: max gap {gap:.4f}, final F {final:.4f}")
        assert report("Fock truncation robustness", ok_all, "; ".join(details))


@pytest.mark.slow
class TestExperimentalRun:
    def test_fig5d_experimental_fidelities(self):
        """Criterion 7: cascade model at the published cavity/atom rates gives
        bipartite fidelity 0.9831 +/- 0.005 and tripartite 0.9857 +/- 0.005
        at effective-coupling time 20."""
        ok_all = True
        details = []
        targets = {"fig5d-n2": 0.9831, "fig5d-n3": 0.9857}
        for config in sc.preset_fig5d():
            series, _ = sc.run_scenario(config)
            fid = series.records["fidelity"][-1]
            want = targets[config.name]
            ok = abs(fid - want) <= 0.005
            ok_all = ok_all and ok
            details.append(f"{config.name}: F(20) = {fid:.4f} (want {want} +/- 0.005)")
        assert report("experimental-parameter run", ok_all, "; ".join(details))


class TestPropertySuites:
    def test_cross_tier_adiabatic_elimination(self):
        """Criterion 8a: cavity-resolved vs collective-damping dynamics agree
        in the blockade-sector populations within 0.02 up to t = 100/Gamma."""
        p = reduced_params(2, 0.25, 2.5, kappa=25.0, fock_dim=3)
        bell = target_state("bell_antisym", 2).vector
        w2 = target_state("w", 2).vector
        results = {}
        grids = {ModelTier.BLOCKADE_CAVITY: TimeGrid(0.0, 100.0, dt=1e-3, sample_every=500),
                 ModelTier.ATOM_COLLECTIVE: TimeGrid(0.0, 100.0, dt=1e-3, sample_every=500)}
        for tier, grid in grids.items():
            liou = assemble(p, tier)
            rho0 = DensityMatrix.pure(liou.layout, ground_state(liou.layout))
            obs = {
                "pop_target": lambda r, lay=liou.layout: population_mat(r, lay, bell),
                "pop_bright": lambda r, lay=liou.layout: population_mat(r, lay, w2),
            }
            results[tier] = evolve_rk4(liou, rho0, grid, obs)
        gap_target = np.abs(results[ModelTier.BLOCKADE_CAVITY].records["pop_target"]
                            - results[ModelTier.ATOM_COLLECTIVE].records["pop_target"]).max()
        gap_bright = np.abs(results[ModelTier.BLOCKADE_CAVITY].records["pop_bright"]
                            - results[ModelTier.ATOM_COLLECTIVE].records["pop_bright"]).max()
        ok = gap_target <= 0.02 and gap_bright <= 0.02
        assert report("cross-tier adiabatic elimination", ok,
                      f"max target gap {gap_target:.4f}, max bright gap {gap_bright:.4f}")

    def test_dark_state_feedback_invariance(self):
        """Criterion 8b: states annihilated by the jump operator are exactly
        stationary under the feedback-modified dissipator."""
        from rydstab.liouville import feedback_dissipator
        from rydstab.model import build_collective_ops, build_feedback_unitary

        worst = 0.0
        for n, kind in ((2, "bell_antisym"), (3, "dfs"), (4, "dfs")):
            p = reduced_params(n, 1.0, 2.5, kappa=25.0, feedback_angle=0.77)
            _, j_c = build_collective_ops(p)
            u = build_feedback_unitary(p).mat
            dark = target_state(kind, n).vector
            rho = np.outer(dark, dark.conj())
            worst = max(worst, float(np.abs(feedback_dissipator(u, j_c.mat, rho)).max()))
        ok = worst < 1e-14
        assert report("dark-state feedback invariance", ok, f"max residual {worst:.2e}")

    def test_trajectory_ensemble_vs_master_equation(self):
        """Criterion 8c: 500-trajectory ensemble matches the deterministic
        solution within three standard errors."""
        p = reduced_params(2, 0.25, 2.5, kappa=25.0, feedback_angle=math.pi / 2)
        liou = assemble(p, ModelTier.ATOM_IDEAL)
        bell = target_state("bell_antisym", 2).vector
        obs = {"pop": lambda r: population_mat(r, liou.layout, bell)}
        grid = TimeGrid(0.0, 15.0, dt=5e-3, sample_every=300)
        rho0 = DensityMatrix.pure(liou.layout, ground_state(liou.layout))
        me = evolve_rk4(liou, rho0, TimeGrid(0.0, 15.0, dt=1e-3, sample_every=1500), obs)
        ens = trajectory_mean(p, ModelTier.ATOM_IDEAL,
                              ground_state(liou.layout), grid,
                              n_trajectories=500, master_seed=11,
                              observables=obs)
        resid = np.abs(ens.means["pop"] - me.records["pop"])
        gate = 3.0 * np.maximum(ens.sems["pop"], 1e-4)
        worst = float((resid / gate).max())
        ok = worst <= 1.0
        assert report("trajectory ensemble vs master equation", ok,
                      f"worst residual {worst:.2f}x the 3-sigma gate")

    def test_state_quality_diagnostics_on_scenarios(self):
        """Criterion 8d: trace, Hermiticity, and positivity stay within
        bounds on every preset run exercised above."""
        worst_drift = 0.0
        worst_herm = 0.0
        worst_eig = 0.0
        for preset in ("fig2c", "fig3"):
            for config in sc.PRESETS[preset]():
                series, _ = sc.run_scenario(config)
                worst_drift = max(worst_drift, series.records["trace_err"].max())
                worst_herm = max(worst_herm, series.records["herm_err"].max())
                worst_eig = min(worst_eig, series.records["min_eig"].min())
        ok = worst_drift < 1e-9 and worst_herm < 1e-9 and worst_eig > -1e-7
        assert report("state-quality diagnostics", ok,
                      f"max trace drift {worst_drift:.2e}, max Hermiticity defect "
                      f"{worst_herm:.2e}, min eigenvalue {worst_eig:.2e}")


class TestQualitativeFigure5:
    def test_stark_shift_retards_convergence(self):
        """Residual level shifts slow convergence without changing the
        stationary target; double-Rydberg weight stays under 1e-3 with the
        blockade on."""
        runs = {c.name: sc.run_scenario(c)[0] for c in sc.preset_fig5a()}
        plain = runs["fig5a-blockade-nostark"]
        stark = runs["fig5a-blockade-stark"]
        idx = at_time(plain, 20.0)
        retarded = stark.records["fidelity"][idx] < plain.records["fidelity"][idx]
        same_target = abs(plain.records["fidelity"][-1]
                          - stark.records["fidelity"][-1]) < 0.02
        rr_max = max(runs["fig5a-blockade-nostark"].records["pop_rr"].max(),
                     runs["fig5a-blockade-stark"].records["pop_rr"].max())
        ok = retarded and same_target and rr_max <= 1e-3
        assert report(
            "residual-shift retardation + blockade confinement", ok,
            f"F(20) {plain.records['fidelity'][idx]:.4f} -> "
            f"{stark.records['fidelity'][idx]:.4f} with shifts, "
            f"late gap {abs(plain.records['fidelity'][-1] - stark.records['fidelity'][-1]):.4f}, "
            f"max double-Rydberg weight {rr_max:.2e}")
