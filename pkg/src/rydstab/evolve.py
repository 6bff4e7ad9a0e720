"""Time evolution of density matrices and Monte-Carlo wavefunction unraveling.

Fixed-step RK4 is the workhorse. For a constant generator the four stages
collapse to one precomputed linear map per step (the degree-4 Taylor
polynomial of M*dt applied to vec(rho), which is arithmetically what classic
RK4 produces on a linear autonomous system), so small time-independent tiers
integrate at one matrix-vector product per step. An adaptive Dormand-Prince
integrator built on scipy serves as the accuracy oracle and handles the stiff
full-tier runs when a fixed step is inconvenient.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .liouville import Liouvillian
from .model import ModelTier, PhysicalParams
from .ops import Array, DensityMatrix, SpaceLayout

log = logging.getLogger(__name__)

TRACE_SILENT = 1e-12
TRACE_ABORT = 1e-6
EIG_SILENT = -1e-12  # negative spectrum below this gets clamped at samples
EIG_ABORT = -1e-7  # positivity loss beyond integrator noise aborts
FUSED_MAX_DIM_SQ = 1100  # largest total_dim**2 for the fused linear-step path


class IntegrationError(RuntimeError):
    """Raised when trace drift or step control indicates a broken run."""


@dataclass(frozen=True)
class TimeGrid:
    t0: float
    t1: float
    dt: float | None = None
    tol: float | None = None
    sample_every: int = 1

    def __post_init__(self):
        if self.t1 <= self.t0:
            raise ValueError("need t1 > t0")
        if self.dt is None and self.tol is None:
            raise ValueError("need a step dt or a tolerance tol")
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.tol is not None and self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.sample_every < 1:
            raise ValueError("sample_every must be >= 1")


@dataclass
class TimeSeries:
    times: Array
    records: dict[str, Array]
    final_state: DensityMatrix
    renormalizations: int = 0
    max_trace_drift: float = 0.0

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("sample times must be strictly increasing")


class _Recorder:
    def __init__(self, observables):
        self.observables = dict(observables or {})
        self.times: list[float] = []
        self.rows: dict[str, list[float]] = {name: [] for name in self.observables}
        for diag in ("trace_err", "herm_err", "min_eig"):
            self.rows[diag] = []
        self.renormalizations = 0
        self.max_drift = 0.0

    def sample(self, t: float, rho: Array) -> Array:
        trace_err = abs(rho.trace().real - 1.0) + abs(rho.trace().imag)
        herm_err = float(np.abs(rho - rho.conj().T).max())
        self.max_drift = max(self.max_drift, trace_err)
        if trace_err > TRACE_ABORT:
            raise IntegrationError(
                f"trace drift {trace_err:.3e} at t={t:.6g} exceeds {TRACE_ABORT}; "
                "the step size is too large for this generator"
            )
        rho = 0.5 * (rho + rho.conj().T)
        if trace_err > TRACE_SILENT:
            rho = rho / rho.trace().real
            self.renormalizations += 1
            log.debug("renormalized trace drift %.3e at t=%.6g", trace_err, t)
        vals, vecs = np.linalg.eigh(rho)
        min_eig = float(vals[0])
        if min_eig < EIG_ABORT:
            raise IntegrationError(
                f"positivity lost (min eigenvalue {min_eig:.3e}) at t={t:.6g}; "
                "the step size is too large for this generator"
            )
        if min_eig < EIG_SILENT:
            # truncation-level negativity: clamp and renormalize, keeping the
            # raw value in the diagnostics record
            clamped = np.clip(vals, 0.0, None)
            rho = (vecs * (clamped / clamped.sum())) @ vecs.conj().T
            self.renormalizations += 1
            log.debug("clamped negative spectrum %.3e at t=%.6g", min_eig, t)
        self.times.append(t)
        self.rows["trace_err"].append(trace_err)
        self.rows["herm_err"].append(herm_err)
        self.rows["min_eig"].append(min_eig)
        for name, fn in self.observables.items():
            self.rows[name].append(float(fn(rho)))
        return rho

    def finish(self, layout: SpaceLayout, rho: Array) -> TimeSeries:
        records = {name: np.array(vals) for name, vals in self.rows.items()}
        final = DensityMatrix(layout, rho)
        return TimeSeries(np.array(self.times), records, final,
                          renormalizations=self.renormalizations,
                          max_trace_drift=self.max_drift)


def _taylor4_step_matrix(m: Array, dt: float) -> Array:
    """I + M dt + ... + (M dt)^4/24, the exact linear-system RK4 step."""
    eye = np.eye(m.shape[0], dtype=complex)
    mdt = m * dt
    r = eye + mdt / 4.0
    r = eye + (mdt / 3.0) @ r
    r = eye + (mdt / 2.0) @ r
    return eye + mdt @ r


def _check_full_tier_step(liou: Liouvillian, dt: float):
    if liou.tier is ModelTier.FULL_3LEVEL:
        p: PhysicalParams = liou.params
        bound = 2.0 * math.pi / (20.0 * max(abs(p.delta_a), abs(p.delta_b)))
        if dt > bound * (1 + 1e-12):
            raise ValueError(
                f"dt={dt:.3e} too coarse for the drive phases; need dt <= {bound:.3e}"
            )


def evolve_rk4(liou: Liouvillian, rho0: DensityMatrix, grid: TimeGrid,
               observables=None) -> TimeSeries:
    """Classic fixed-step 4th-order integration with per-sample diagnostics.

    Samples are re-Hermitized, trace drift beyond 1e-12 is renormalized and
    logged, and drift beyond 1e-6 aborts the run.
    """
    if rho0.layout != liou.layout:
        raise ValueError("initial state layout does not match the Liouvillian")
    if grid.dt is None:
        raise ValueError("evolve_rk4 needs a fixed step dt")
    _check_full_tier_step(liou, grid.dt)
    n_steps = int(round((grid.t1 - grid.t0) / grid.dt))
    if n_steps < 1:
        raise ValueError("grid shorter than one step")
    dt = (grid.t1 - grid.t0) / n_steps

    rec = _Recorder(observables)
    rho = rec.sample(grid.t0, rho0.mat.copy())
    d = liou.layout.total_dim

    fused = (not liou.time_dependent) and d * d <= FUSED_MAX_DIM_SQ
    if fused:
        # one linear map per *sample*: stride the per-step matrix by repeated
        # squaring (identical arithmetic to stepping, fewer passes)
        step_mat = _taylor4_step_matrix(liou.dense_form, dt)
        stride = min(grid.sample_every, n_steps)
        stride_mat = np.linalg.matrix_power(step_mat, stride)
        vec = rho.flatten(order="F")
        k = 0
        while k < n_steps:
            if k + stride <= n_steps:
                vec = stride_mat @ vec
                k += stride
            else:
                vec = np.linalg.matrix_power(step_mat, n_steps - k) @ vec
                k = n_steps
            rho = rec.sample(grid.t0 + k * dt, vec.reshape((d, d), order="F"))
            vec = rho.flatten(order="F")
    else:
        t = grid.t0
        for k in range(1, n_steps + 1):
            k1 = liou.apply(t, rho)
            k2 = liou.apply(t + dt / 2, rho + (dt / 2) * k1)
            k3 = liou.apply(t + dt / 2, rho + (dt / 2) * k2)
            k4 = liou.apply(t + dt, rho + dt * k3)
            rho = rho + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
            t = grid.t0 + k * dt
            if k % grid.sample_every == 0 or k == n_steps:
                rho = rec.sample(t, rho)
    return rec.finish(liou.layout, rho)


def evolve_adaptive(liou: Liouvillian, rho0: DensityMatrix, t1: float, tol: float,
                    observables=None, n_samples: int = 201) -> TimeSeries:
    """Adaptive Dormand-Prince 4(5) integration of vec(rho); oracle for RK4 runs."""
    if not 1e-12 <= tol <= 1e-4:
        raise ValueError("tol must lie in [1e-12, 1e-4]")
    if rho0.layout != liou.layout:
        raise ValueError("initial state layout does not match the Liouvillian")
    d = liou.layout.total_dim

    def rhs(t, y):
        return liou.apply(t, y.reshape((d, d), order="F")).flatten(order="F")

    t_eval = np.linspace(0.0, t1, n_samples)
    sol = solve_ivp(rhs, (0.0, t1), rho0.mat.flatten(order="F"), method="RK45",
                    t_eval=t_eval, rtol=tol, atol=tol * 1e-2)
    if not sol.success:
        # includes the solver's own step-underflow abort
        raise IntegrationError(f"adaptive integration failed: {sol.message}")
    rec = _Recorder(observables)
    rho = rho0.mat
    for t, col in zip(sol.t, sol.y.T):
        rho = rec.sample(float(t), col.reshape((d, d), order="F"))
    return rec.finish(liou.layout, rho)


def evolve_expm(liou: Liouvillian, rho0: DensityMatrix, t1: float,
                n_samples: int = 201, observables=None) -> TimeSeries:
    """Exact propagation vec(rho(t)) = expm(M t) vec(rho0); cross-check oracle."""
    if liou.time_dependent:
        raise ValueError("matrix-exponential propagation needs a constant generator")
    d = liou.layout.total_dim
    times = np.linspace(0.0, t1, n_samples)
    step = expm(liou.dense_form * (times[1] - times[0]))
    rec = _Recorder(observables)
    vec = rho0.mat.flatten(order="F")
    rho = rec.sample(times[0], rho0.mat)
    for t in times[1:]:
        vec = step @ vec
        rho = rec.sample(float(t), vec.reshape((d, d), order="F"))
        vec = rho.flatten(order="F")
    return rec.finish(liou.layout, rho)


@dataclass
class TrajectoryResult:
    times: Array
    records: dict[str, Array]
    n_jumps: int
    jump_times: list = field(default_factory=list)
    jump_labels: list = field(default_factory=list)
    final_psi: Array | None = None


def jump_trajectory(p: PhysicalParams, tier: ModelTier, psi0: Array, grid: TimeGrid,
                    seed, observables=None, liou: Liouvillian | None = None) -> TrajectoryResult:
    """One Monte-Carlo wavefunction trajectory with feedback-aware jumps.

    Deterministic evolution follows the non-Hermitian drift H - (i/2) sum
    rate c^dag c (applied exactly per step via its matrix exponential); jumps
    fire with first-order probability dt * rate * <c^dag c> and apply the
    channel operator, which already carries the feedback unitary on the
    detected branch; the detected branch fires with probability eta by the
    rate split.
    """
    from .liouville import assemble

    tier = ModelTier(tier)
    if tier not in (ModelTier.EFFECTIVE_CAVITY, ModelTier.EFFECTIVE_CAVITY_ETA,
                    ModelTier.ATOM_COLLECTIVE, ModelTier.ATOM_IDEAL):
        raise ValueError(f"trajectory unraveling not defined for tier {tier}")
    if grid.dt is None:
        raise ValueError("trajectories need a fixed step dt")
    if liou is None:
        liou = assemble(p, tier)
    psi = np.asarray(psi0, dtype=complex).ravel().copy()
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > 1e-10:
        raise ValueError("initial state must be normalized")
    psi /= nrm

    h = liou.hamiltonian_matrix(0.0)
    ops = [ch.op for ch in liou.channels]
    rates = np.array([ch.rate for ch in liou.channels])
    labels = [ch.label for ch in liou.channels]
    drift = -1j * h.astype(complex)
    for c, r in zip(ops, rates):
        drift -= 0.5 * r * (c.conj().T @ c)

    n_steps = int(round((grid.t1 - grid.t0) / grid.dt))
    dt = (grid.t1 - grid.t0) / n_steps
    step_op = expm(drift * dt)

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    observables = dict(observables or {})
    times = [grid.t0]
    rows = {name: [float(fn(np.outer(psi, psi.conj())))] for name, fn in observables.items()}
    jump_times = []
    jump_labels = []

    for k in range(1, n_steps + 1):
        c_psis = [c @ psi for c in ops]
        probs = np.array([dt * r * float(np.vdot(cp, cp).real)
                          for r, cp in zip(rates, c_psis)])
        p_tot = probs.sum()
        if p_tot > 0.1:
            raise IntegrationError(
                f"jump probability {p_tot:.3f} per step too large; reduce dt"
            )
        u = rng.random()
        jumped = False
        if u < p_tot:
            idx = int(np.searchsorted(np.cumsum(probs), u))
            after = c_psis[idx]
            nrm = np.linalg.norm(after)
            if nrm < 1e-14:
                # round-off selected a dead channel; resample the step as drift
                jumped = False
            else:
                psi = after / nrm
                jump_times.append(grid.t0 + k * dt)
                jump_labels.append(labels[idx])
                jumped = True
        if not jumped:
            psi = step_op @ psi
            psi /= np.linalg.norm(psi)
        if k % grid.sample_every == 0 or k == n_steps:
            times.append(grid.t0 + k * dt)
            rho = np.outer(psi, psi.conj())
            for name, fn in observables.items():
                rows[name].append(float(fn(rho)))

    return TrajectoryResult(np.array(times), {n: np.array(v) for n, v in rows.items()},
                            n_jumps=len(jump_times), jump_times=jump_times,
                            jump_labels=jump_labels, final_psi=psi)


@dataclass
class EnsembleResult:
    times: Array
    means: dict[str, Array]
    sems: dict[str, Array]  # standard error of the mean per record
    final_state: DensityMatrix
    n_trajectories: int


def trajectory_mean(p: PhysicalParams, tier: ModelTier, psi0: Array, grid: TimeGrid,
                    n_trajectories: int, master_seed: int,
                    observables=None) -> EnsembleResult:
    """Ensemble average of jump trajectories.

    Each trajectory draws its generator from (master_seed, index), so runs
    are reproducible and order-independent; the returned final state is the
    ensemble-mean density matrix.
    """
    from .liouville import assemble

    liou = assemble(p, ModelTier(tier))
    acc: dict[str, list[Array]] = {}
    times = None
    rho_final = np.zeros((liou.layout.total_dim,) * 2, dtype=complex)
    for idx in range(n_trajectories):
        res = jump_trajectory(p, tier, psi0, grid, seed=(master_seed, idx),
                              observables=observables, liou=liou)
        times = res.times
        rho_final += np.outer(res.final_psi, res.final_psi.conj())
        for name, vals in res.records.items():
            acc.setdefault(name, []).append(vals)
    means = {}
    sems = {}
    for name, series in acc.items():
        stack = np.vstack(series)
        means[name] = stack.mean(axis=0)
        sems[name] = stack.std(axis=0, ddof=1) / math.sqrt(n_trajectories)
    final = DensityMatrix(liou.layout, rho_final / n_trajectories)
    return EnsembleResult(times, means, sems, final, n_trajectories)
