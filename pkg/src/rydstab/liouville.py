"""Right-hand sides rho -> drho/dt for every model tier.

Each tier assembles a Hamiltonian plus a list of jump channels into a
`Liouvillian` whose `apply(t, rho)` is complex-linear (so it vectorizes to a
dense superoperator for the steady-state solver). Channel applications use
structure-aware fast paths: single-matrix-element atomic decays reduce to
tensor slicing, collective lowering operators to rank-one updates, and
anticommutator terms to a diagonal broadcast whenever every c^dag c is
diagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import (
    ModelTier,
    PhysicalParams,
    build_collective_ops,
    build_effective_hamiltonian,
    build_feedback_unitary,
    build_stark_hamiltonian,
    derive,
    full_hamiltonian_blocks,
    tier_layout,
)
from .ops import (
    Array,
    OperatorMatrix,
    SpaceLayout,
    annihilation,
    atoms_layout,
    embed,
    product_ket,
    project_subspace,
    transition_op,
)
UNITARY_TOL = 1e-10


def dissipator(c, rho: Array) -> Array:
    """c rho c^dag - (c^dag c rho + rho c^dag c) / 2."""
    c = c.mat if isinstance(c, OperatorMatrix) else np.asarray(c)
    if c.shape != rho.shape:
        raise ValueError(f"shape mismatch: operator {c.shape} vs state {rho.shape}")
    ctc = c.conj().T @ c
    return c @ rho @ c.conj().T - 0.5 * (ctc @ rho + rho @ ctc)


def split_dissipator(c, rho: Array) -> tuple[Array, Array]:
    """(jump, null) parts: c rho c^dag and {c^dag c, rho}/2; jump - null is the dissipator."""
    c = c.mat if isinstance(c, OperatorMatrix) else np.asarray(c)
    if c.shape != rho.shape:
        raise ValueError(f"shape mismatch: operator {c.shape} vs state {rho.shape}")
    ctc = c.conj().T @ c
    jump = c @ rho @ c.conj().T
    null = 0.5 * (ctc @ rho + rho @ ctc)
    return jump, null


def feedback_dissipator(u, c, rho: Array) -> Array:
    """Dissipator of u c for unitary u; the null part is unchanged since c^dag u^dag u c = c^dag c."""
    u = u.mat if isinstance(u, OperatorMatrix) else np.asarray(u)
    defect = np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()
    if defect > UNITARY_TOL:
        raise ValueError(f"feedback operator not unitary (defect {defect:.3e})")
    c = c.mat if isinstance(c, OperatorMatrix) else np.asarray(c)
    return dissipator(u @ c, rho)


@dataclass
class JumpChannel:
    """One Lindblad channel; `op` already carries any feedback unitary."""

    op: Array
    rate: float
    feedback: bool = False
    label: str = ""
    # fast-path descriptors (set by assemble, optional)
    site: int | None = None
    level_from: int | None = None
    level_to: int | None = None
    rank1: tuple[Array, Array] | None = None  # op == outer(v, w.conj())
    # op == kron(atom_mat, w |x><y|) on an atoms+Fock layout
    kron_fock: tuple[Array, int, int, float] | None = None


@dataclass
class Liouvillian:
    """Time-aware map rho -> drho/dt with optional dense superoperator form."""

    tier: ModelTier
    layout: SpaceLayout
    hamiltonian: object  # Array or an object with .at(t) -> Array
    channels: list[JumpChannel]
    time_dependent: bool
    params: PhysicalParams
    reduced_basis: Array | None = None  # full-space columns of the 3-state basis
    _anti_rank1: list = field(default_factory=list, repr=False)
    _dense: Array | None = field(default=None, repr=False)

    def __post_init__(self):
        self._compile()

    def _compile(self):
        d = self.layout.total_dim
        alpha = np.zeros(d)
        anti_rank1 = []
        anti_dense = None
        for ch in self.channels:
            if ch.rank1 is not None:
                _, w = ch.rank1
                anti_rank1.append((0.5 * ch.rate, w))
                continue
            ctc = ch.op.conj().T @ ch.op
            diag = ctc.diagonal().real
            if np.abs(ctc - np.diag(diag)).max() < 1e-14:
                alpha += 0.5 * ch.rate * diag
            else:
                if anti_dense is None:
                    anti_dense = np.zeros((d, d), dtype=complex)
                anti_dense += 0.5 * ch.rate * ctc
        self._anti_rank1 = anti_rank1
        for ch in self.channels:
            if ch.rank1 is not None:
                v, _ = ch.rank1
                ch._vv = np.outer(v, v.conj())
            elif ch.site is not None:
                # flat gather/scatter indices for c rho c^dag of a
                # single-matrix-element site operator
                ch._scatter = _local_indices(self.layout, ch.site,
                                             ch.level_from, ch.level_to)
        # fold -iH and the non-rank-1 anticommutator half into one drift
        # matrix G, so apply() spends its matrix products on G rho + rho G^dag
        damp = np.diag(alpha).astype(complex)
        if anti_dense is not None:
            damp = damp + anti_dense
        if self.time_dependent:
            self._g_static = -1j * self.hamiltonian.static - damp
        else:
            self._drift = -1j * np.asarray(self.hamiltonian, dtype=complex) - damp

    def hamiltonian_matrix(self, t: float = 0.0) -> Array:
        h = self.hamiltonian
        return h.at(t) if hasattr(h, "at") else h

    def _drift_at(self, t: float) -> Array:
        blocks = self.hamiltonian
        za = np.exp(1j * blocks.delta_a * t)
        zb = np.exp(1j * blocks.delta_b * t)
        legs = zb * blocks.cavity_leg
        legs += np.conj(za) * blocks.pump_leg
        legs += np.conj(zb) * blocks.dress_leg
        legs += za * blocks.upper_leg
        g = self._g_static - 1j * legs
        g -= 1j * legs.conj().T
        return g

    def apply(self, t: float, rho: Array) -> Array:
        g = self._drift_at(t) if self.time_dependent else self._drift
        out = g @ rho
        out += rho @ g.conj().T
        for wt, w in self._anti_rank1:
            wr = w.conj() @ rho
            out -= wt * np.outer(w, wr)
            out -= wt * np.outer(rho @ w, w.conj())
        out_flat = out.reshape(-1)
        rho_flat = rho.reshape(-1)
        for ch in self.channels:
            if ch.rank1 is not None:
                v, w = ch.rank1
                s = w.conj() @ rho @ w
                out += (ch.rate * s) * ch._vv
            elif ch.site is not None:
                idx_out, idx_in = ch._scatter
                out_flat[idx_out] += ch.rate * rho_flat[idx_in]
            elif ch.kron_fock is not None:
                a_mat, x, y, w = ch.kron_fock
                d_at = a_mat.shape[0]
                fock = self.layout.fock_dim
                block = np.ascontiguousarray(
                    rho.reshape(d_at, fock, d_at, fock)[:, y, :, y])
                out.reshape(d_at, fock, d_at, fock)[:, x, :, x] += \
                    (ch.rate * w * w) * (a_mat @ block @ a_mat.conj().T)
            else:
                cr = ch.op @ rho
                out += ch.rate * (cr @ ch.op.conj().T)
        return out

    @property
    def dense_form(self) -> Array:
        if self._dense is None:
            self._dense = to_matrix(self)
        return self._dense


def to_matrix(liou: Liouvillian) -> Array:
    """Dense superoperator M with M vec(rho) = vec(apply(rho)), columns stacked column-major."""
    if liou.time_dependent:
        raise ValueError("dense superoperator only exists for time-independent tiers")
    d = liou.layout.total_dim
    if d * d > 10000:
        raise ValueError(f"superoperator of side {d * d} is out of scope; use apply directly")
    m = np.zeros((d * d, d * d), dtype=complex)
    basis = np.zeros((d, d), dtype=complex)
    for k in range(d * d):
        i, j = k % d, k // d
        basis[i, j] = 1.0
        m[:, k] = liou.apply(0.0, basis).flatten(order="F")
        basis[i, j] = 0.0
    return m


def _local_indices(layout: SpaceLayout, site: int, lv_from: int, lv_to: int):
    """Flat C-order (scatter, gather) indices realizing c rho c^dag for
    c = embed(|to><from|, site): copy the (from, from) block into (to, to)."""
    d = layout.total_dim
    dims = layout.site_dims
    stride = math.prod(dims[site + 1:])
    idx = np.arange(d)
    rows_in = idx[(idx // stride) % dims[site] == lv_from]
    rows_out = rows_in + (lv_to - lv_from) * stride
    idx_in = (rows_in[:, None] * d + rows_in[None, :]).reshape(-1)
    idx_out = (rows_out[:, None] * d + rows_out[None, :]).reshape(-1)
    return idx_out, idx_in


def _local_channel(layout: SpaceLayout, site: int, lv_from: int, lv_to: int,
                   rate: float, label: str) -> JumpChannel:
    op = embed(transition_op(lv_from, lv_to, layout.site_dims[site]), site, layout).mat
    return JumpChannel(op=op, rate=rate, label=label, site=site,
                       level_from=lv_from, level_to=lv_to)


def _atomic_decay_channels(layout: SpaceLayout, p: PhysicalParams) -> list[JumpChannel]:
    chans = []
    excited = 1 if layout.site_dims[0] == 2 else 2
    if p.gamma_r > 0.0:
        for i in range(p.n_atoms):
            chans.append(_local_channel(layout, i, excited, 0, p.gamma_r, f"gamma_r[{i}]"))
    return chans


def _cavity_channels(layout: SpaceLayout, p: PhysicalParams) -> list[JumpChannel]:
    """kappa-decay of the cavity mode, split into detected (feedback-carrying)
    and undetected branches according to the detector efficiency.

    For a two-state Fock mode the channel factors as kron(atomic unitary,
    |0><1|), which the apply() fast path exploits.
    """
    a = embed(annihilation(p.fock_dim).mat, layout.n_sites - 1, layout).mat
    chans = []
    eta = p.eta
    d_at = layout.total_dim // p.fock_dim
    if eta > 0.0:
        u_fb = build_feedback_unitary(p, layout=layout.atoms_only())
        u_full = np.kron(u_fb.mat, np.eye(p.fock_dim))
        kf = (u_fb.mat, 0, 1, 1.0) if p.fock_dim == 2 else None
        chans.append(JumpChannel(op=u_full @ a, rate=eta * p.kappa, feedback=True,
                                 label="cavity+fb", kron_fock=kf))
    if eta < 1.0:
        kf = (np.eye(d_at, dtype=complex), 0, 1, 1.0) if p.fock_dim == 2 else None
        chans.append(JumpChannel(op=a, rate=(1.0 - eta) * p.kappa, label="cavity",
                                 kron_fock=kf))
    return chans


def _collective_channels(layout: SpaceLayout, p: PhysicalParams, j_c: Array,
                         gamma_collective: float) -> list[JumpChannel]:
    ground = product_ket(layout, [0] * layout.n_sites)
    w = j_c.conj().T @ ground  # weight vector: j_c == outer(ground, w.conj())
    chans = []
    eta = p.eta
    if eta > 0.0:
        u_fb = build_feedback_unitary(p, layout=layout)
        v = u_fb.mat @ ground
        chans.append(JumpChannel(op=u_fb.mat @ j_c, rate=eta * gamma_collective,
                                 feedback=True, label="collective+fb", rank1=(v, w)))
    if eta < 1.0:
        chans.append(JumpChannel(op=j_c, rate=(1.0 - eta) * gamma_collective,
                                 label="collective", rank1=(ground, w)))
    return chans


def reduced_basis(p: PhysicalParams) -> Array:
    """Columns {ground, bright, dark} spanning the feedback-reachable sector.

    `bright` is the normalized image of the ground state under the collective
    raising operator; `dark` is the single-excitation state orthogonal to it
    inside span{bright, single excitation of atom 1}, signed so that equal
    couplings reproduce the canonical target (amplitude -(n-1) on atom 1).
    """
    dp = derive(p)
    ratios_l = np.array([w / dp.omega_eff for w in dp.omega_eff_i])
    ratios_c = np.array([w / dp.g_eff for w in dp.g_eff_i])
    if np.abs(ratios_l - ratios_c).max() > 1e-10:
        raise ValueError(
            "reduced tier needs matching laser and cavity coupling ratios "
            f"(got {ratios_l} vs {ratios_c})"
        )
    if ratios_l[0] == 0.0:
        raise ValueError("feedback on atom 1 needs a nonzero coupling on atom 1")
    layout = atoms_layout(p.n_atoms, 2)
    ground = product_ket(layout, [0] * layout.n_sites)
    singles = []
    for i in range(p.n_atoms):
        levels = [0] * p.n_atoms
        levels[i] = 1
        singles.append(product_ket(layout, levels))
    bright = sum(r * s for r, s in zip(ratios_l, singles))
    bright = bright / np.linalg.norm(bright)
    e1 = singles[0]
    dark = e1 - (bright.conj() @ e1) * bright
    nrm = np.linalg.norm(dark)
    if nrm < 1e-12:
        raise ValueError("dark state degenerate with the bright state")
    dark = -dark / nrm
    return np.column_stack([ground, bright, dark])


def assemble(p: PhysicalParams, tier: ModelTier) -> Liouvillian:
    """Generator of the cited master-equation tier.

    The detected decay channel (the cavity mode for cavity tiers, the
    collective lowering operator for atom-only tiers) carries the feedback
    unitary at rate eta*rate, with the undetected remainder (1-eta)*rate
    left bare; feedback_angle = 0 makes the unitary the identity and
    recovers the feedback-free equations.
    """
    tier = ModelTier(tier)
    layout = tier_layout(tier, p)

    if tier is ModelTier.FULL_3LEVEL:
        blocks = full_hamiltonian_blocks(p)
        chans = _cavity_channels(layout, p)
        for i in range(p.n_atoms):
            if p.gamma_r > 0.0:
                chans.append(_local_channel(layout, i, 2, 1, 0.5 * p.gamma_r, f"r->p[{i}]"))
                chans.append(_local_channel(layout, i, 2, 0, 0.5 * p.gamma_r, f"r->g[{i}]"))
            if p.gamma_p > 0.0:
                chans.append(_local_channel(layout, i, 1, 0, p.gamma_p, f"p->g[{i}]"))
        return Liouvillian(tier, layout, blocks, chans, True, p)

    if p.gamma_p != 0.0:
        raise ValueError(f"{tier.value} has no intermediate level; gamma_p must be 0")

    if tier in (ModelTier.EFFECTIVE_CAVITY, ModelTier.EFFECTIVE_CAVITY_ETA):
        if p.gamma_r != 0.0:
            raise ValueError(f"{tier.value} neglects atomic decay; gamma_r must be 0")
        h = build_effective_hamiltonian(p).mat
        if p.include_stark:
            h = h + build_stark_hamiltonian(p).mat
        chans = _cavity_channels(layout, p)
        return Liouvillian(tier, layout, h, chans, False, p)

    if p.include_stark:
        raise ValueError(f"{tier.value} cannot carry the residual level shifts")
    if not p.blockade_on:
        raise ValueError(f"{tier.value} is a blockade-restricted model; blockade_on must be set")

    dp = derive(p)

    if tier is ModelTier.BLOCKADE_CAVITY:
        j_l, j_c = build_collective_ops(p)
        a = embed(annihilation(p.fock_dim).mat, layout.n_sites - 1, layout).mat
        eye_f = np.eye(p.fock_dim)
        jl_full = np.kron(j_l.mat, eye_f)
        jc_full = np.kron(j_c.mat, eye_f)
        h = dp.omega_eff * (jl_full + jl_full.conj().T)
        h += dp.g_eff * (jc_full.conj().T @ a + jc_full @ a.conj().T)
        chans = _cavity_channels(layout, p)
        chans += _atomic_decay_channels(layout, p)
        return Liouvillian(tier, layout, h, chans, False, p)

    if tier in (ModelTier.ATOM_COLLECTIVE, ModelTier.ATOM_IDEAL):
        if tier is ModelTier.ATOM_IDEAL and p.gamma_r != 0.0:
            raise ValueError("the ideal atom tier neglects atomic decay; gamma_r must be 0")
        j_l, j_c = build_collective_ops(p)
        h = dp.omega_eff * (j_l.mat + j_l.mat.conj().T)
        chans = _collective_channels(layout, p, j_c.mat, dp.gamma_collective)
        if tier is ModelTier.ATOM_COLLECTIVE:
            chans += _atomic_decay_channels(layout, p)
        return Liouvillian(tier, layout, h, chans, False, p)

    if tier is ModelTier.FEEDBACK_REDUCED:
        if p.gamma_r != 0.0:
            raise ValueError("the reduced tier neglects atomic decay; gamma_r must be 0")
        basis = reduced_basis(p)
        full_layout = atoms_layout(p.n_atoms, 2)
        j_l, j_c = build_collective_ops(p)
        h_full = dp.omega_eff * (j_l.mat + j_l.mat.conj().T)
        h = project_subspace(h_full, basis.T)
        chans = []
        if p.eta > 0.0:
            u_fb = build_feedback_unitary(p, layout=full_layout)
            c_red = project_subspace(u_fb.mat @ j_c.mat, basis.T)
            chans.append(JumpChannel(op=c_red, rate=p.eta * dp.gamma_collective,
                                     feedback=True, label="collective+fb"))
        if p.eta < 1.0:
            c_bare = project_subspace(j_c.mat, basis.T)
            chans.append(JumpChannel(op=c_bare, rate=(1.0 - p.eta) * dp.gamma_collective,
                                     label="collective"))
        return Liouvillian(tier, layout, h, chans, False, p, reduced_basis=basis)

    raise ValueError(f"unknown tier {tier}")
