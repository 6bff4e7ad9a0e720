"""Hamiltonians, jump operators and feedback unitaries for every model tier.

All builders consume one `PhysicalParams` record. Rates are dimensionless
multiples of a single declared reference rate (conventionally the collective
damping rate for reduced-tier scenarios and the effective atom-cavity
coupling for full-tier ones); times are in inverse reference units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.linalg import expm

from .ops import (
    Array,
    OperatorMatrix,
    SpaceLayout,
    annihilation,
    atoms_layout,
    cavity_layout,
    embed,
    product_ket,
    transition_op,
)

G, P, R = 0, 1, 2  # three-level indices; two-level sites use |g>=0, |r>=1


class ModelTier(Enum):
    FULL_3LEVEL = "full_3level"
    EFFECTIVE_CAVITY = "effective_cavity"
    EFFECTIVE_CAVITY_ETA = "effective_cavity_eta"
    BLOCKADE_CAVITY = "blockade_cavity"
    ATOM_COLLECTIVE = "atom_collective"
    ATOM_IDEAL = "atom_ideal"
    FEEDBACK_REDUCED = "feedback_reduced"


class FeedbackVariant(Enum):
    EXACT = "exact"
    CONDITIONED = "conditioned"
    UNCONDITIONED = "unconditioned"


@dataclass(frozen=True)
class PhysicalParams:
    """Primitive rates of the driven atom-cavity model (one reference unit).

    Rabi frequencies are real; driving with relative phases is a documented
    extension point, not implemented.
    """

    n_atoms: int
    omega_r: tuple[float, ...]  # lower-leg laser Rabi frequencies, per atom
    omega_b: tuple[float, ...]  # upper-leg laser Rabi frequencies, per atom
    omega_c: tuple[float, ...]  # upper-leg pump paired with the cavity, per atom
    g: float  # atom-cavity coupling
    delta_a: float
    delta_b: float
    u: float  # Rydberg pair shift
    kappa: float  # cavity decay
    gamma_r: float = 0.0  # Rydberg-state decay
    gamma_p: float = 0.0  # intermediate-state decay
    feedback_angle: float = 0.0  # flip angle applied after each detection
    eta: float = 1.0  # detector efficiency
    fock_dim: int = 2
    include_stark: bool = False
    blockade_on: bool = True
    reference_unit: str = "Gamma"

    def __post_init__(self):
        if self.n_atoms < 2:
            raise ValueError("need at least two atoms")
        for name in ("omega_r", "omega_b", "omega_c"):
            vals = tuple(float(v) for v in getattr(self, name))
            if len(vals) != self.n_atoms:
                raise ValueError(f"{name} needs one entry per atom")
            object.__setattr__(self, name, vals)
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError("detector efficiency must lie in [0, 1]")
        if self.fock_dim < 2:
            raise ValueError("fock_dim must be >= 2")
        rates = (self.g, self.delta_a, self.delta_b, self.u, self.kappa,
                 self.gamma_r, self.gamma_p, self.feedback_angle,
                 *self.omega_r, *self.omega_b, *self.omega_c)
        if not all(math.isfinite(v) for v in rates):
            raise ValueError("all rates must be finite")

    @property
    def u_effective(self) -> float:
        return self.u if self.blockade_on else 0.0


@dataclass(frozen=True)
class DerivedParams:
    omega_eff_i: tuple[float, ...]
    g_eff_i: tuple[float, ...]
    omega_eff: float
    g_eff: float
    gamma_collective: float  # 4 g_eff^2 / kappa


def _signed_min(values) -> float:
    return min(values, key=abs)


def derive(p: PhysicalParams) -> DerivedParams:
    """Effective two-level couplings and the collective damping rate.

    The scalar effective couplings follow the minimum-magnitude convention
    (the element of smallest absolute value, sign included), so the per-atom
    ratios omega_eff_i / omega_eff are the weights of the collective lowering
    operators.
    """
    if p.delta_a == 0 or p.delta_b == 0:
        raise ValueError("effective couplings need nonzero detunings")
    omega_eff_i = tuple(wr * wb / p.delta_a for wr, wb in zip(p.omega_r, p.omega_b))
    g_eff_i = tuple(-p.g * wc / p.delta_b for wc in p.omega_c)
    omega_eff = _signed_min(omega_eff_i)
    g_eff = _signed_min(g_eff_i)
    gamma_collective = 4.0 * g_eff**2 / p.kappa if p.kappa != 0 else 0.0
    return DerivedParams(omega_eff_i, g_eff_i, omega_eff, g_eff, gamma_collective)


def reduced_params(
    n_atoms: int,
    omega_eff,
    g_eff,
    kappa: float,
    u: float = 0.0,
    **kwargs,
) -> PhysicalParams:
    """Back-solve primitive fields from effective-level couplings.

    `omega_eff` and `g_eff` may be scalars (uniform couplings) or per-atom
    sequences. Uses unit detunings with the lower-leg laser carrying the
    whole effective Rabi frequency, so derive() reproduces the inputs
    exactly.
    """
    if np.isscalar(omega_eff):
        omega_eff = (float(omega_eff),) * n_atoms
    if np.isscalar(g_eff):
        g_eff = (float(g_eff),) * n_atoms
    return PhysicalParams(
        n_atoms=n_atoms,
        omega_r=tuple(float(w) for w in omega_eff),
        omega_b=(1.0,) * n_atoms,
        omega_c=tuple(-float(ge) for ge in g_eff),
        g=1.0,
        delta_a=1.0,
        delta_b=1.0,
        u=u,
        kappa=kappa,
        **kwargs,
    )


def theta_drive_ratios(theta: float) -> tuple[float, float]:
    """Bipartite coupling pair (c1, c2) whose dark state is cos(t)|gr>+sin(t)|rg>.

    The dark-state condition is c1 sin(theta) + c2 cos(theta) = 0, solved by
    (-cos(theta), sin(theta)).
    """
    return (-math.cos(theta), math.sin(theta))


def w_drive_ratios(n_atoms: int) -> tuple[float, ...]:
    """Coupling pattern (-(n-1), 1, ..., 1) that makes the W state dark."""
    return (-(n_atoms - 1.0),) + (1.0,) * (n_atoms - 1)


def tier_layout(tier: ModelTier, p: PhysicalParams) -> SpaceLayout:
    if tier is ModelTier.FULL_3LEVEL:
        return cavity_layout(p.n_atoms, 3, p.fock_dim)
    if tier in (ModelTier.EFFECTIVE_CAVITY, ModelTier.EFFECTIVE_CAVITY_ETA,
                ModelTier.BLOCKADE_CAVITY):
        return cavity_layout(p.n_atoms, 2, p.fock_dim)
    if tier in (ModelTier.ATOM_COLLECTIVE, ModelTier.ATOM_IDEAL):
        return atoms_layout(p.n_atoms, 2)
    if tier is ModelTier.FEEDBACK_REDUCED:
        # abstract {ground, bright, dark} basis of the blockade sector
        return SpaceLayout((3,))
    raise ValueError(f"unknown tier {tier}")


def _pair_shift(layout: SpaceLayout, n_atoms: int, u: float, excited: int) -> Array:
    """u * sum_{i<j} |r><r|_i |r><r|_j on the given layout."""
    d = layout.total_dim
    h = np.zeros((d, d), dtype=complex)
    if u == 0.0:
        return h
    projs = [embed(transition_op(excited, excited, layout.site_dims[i]), i, layout).mat
             for i in range(n_atoms)]
    for i in range(n_atoms):
        for j in range(i + 1, n_atoms):
            h += u * (projs[i] @ projs[j])
    return h


@dataclass(frozen=True)
class FullHamiltonianBlocks:
    """Drive-leg decomposition of the time-dependent cascade Hamiltonian.

    H(t) = static + z_b B_cav + z_a* B_pump + z_b* B_dress + z_a B_upper + h.c.
    with z_a = exp(i delta_a t), z_b = exp(i delta_b t). Splitting the phases
    out lets integrators rebuild H(t) with four scalar multiplications.
    """

    layout: SpaceLayout
    static: Array  # Rydberg pair shifts (time independent)
    cavity_leg: Array  # g a |p><g| summed over atoms, phase e^{+i delta_b t}
    pump_leg: Array  # Omega_R |p><g|, phase e^{-i delta_a t}
    dress_leg: Array  # Omega_c |r><p|, phase e^{-i delta_b t}
    upper_leg: Array  # Omega_B |r><p|, phase e^{+i delta_a t}
    delta_a: float
    delta_b: float

    def at(self, t: float) -> Array:
        za = np.exp(1j * self.delta_a * t)
        zb = np.exp(1j * self.delta_b * t)
        h = (self.static
             + zb * self.cavity_leg
             + np.conj(za) * self.pump_leg
             + np.conj(zb) * self.dress_leg
             + za * self.upper_leg)
        return h + (h - self.static).conj().T


def full_hamiltonian_blocks(p: PhysicalParams) -> FullHamiltonianBlocks:
    layout = tier_layout(ModelTier.FULL_3LEVEL, p)
    a = embed(annihilation(p.fock_dim).mat, layout.n_sites - 1, layout).mat
    d = layout.total_dim
    cavity_leg = np.zeros((d, d), dtype=complex)
    pump_leg = np.zeros((d, d), dtype=complex)
    dress_leg = np.zeros((d, d), dtype=complex)
    upper_leg = np.zeros((d, d), dtype=complex)
    for i in range(p.n_atoms):
        pg = embed(transition_op(G, P, 3), i, layout).mat  # |p><g|
        rp = embed(transition_op(P, R, 3), i, layout).mat  # |r><p|
        cavity_leg += p.g * (pg @ a)
        pump_leg += p.omega_r[i] * pg
        dress_leg += p.omega_c[i] * rp
        upper_leg += p.omega_b[i] * rp
    static = _pair_shift(layout, p.n_atoms, p.u_effective, R)
    return FullHamiltonianBlocks(layout, static, cavity_leg, pump_leg, dress_leg,
                                 upper_leg, p.delta_a, p.delta_b)


def build_full_hamiltonian(p: PhysicalParams, t: float = 0.0) -> OperatorMatrix:
    """Time-dependent cascade Hamiltonian on the three-level + cavity layout."""
    blocks = full_hamiltonian_blocks(p)
    return OperatorMatrix(blocks.layout, blocks.at(t))


def build_stark_hamiltonian(p: PhysicalParams) -> OperatorMatrix:
    """Residual level shifts left over after eliminating the |p> state.

    Ground shift per atom: omega_r^2/delta_a - (g^2/delta_b) a^dag a;
    excited shift: omega_b^2/delta_a - omega_c^2/delta_b. Lives on the
    two-level + cavity layout and is only added when include_stark is set.
    """
    layout = tier_layout(ModelTier.EFFECTIVE_CAVITY, p)
    a = embed(annihilation(p.fock_dim).mat, layout.n_sites - 1, layout).mat
    n_phot = a.conj().T @ a
    d = layout.total_dim
    h = np.zeros((d, d), dtype=complex)
    eye = np.eye(d, dtype=complex)
    for i in range(p.n_atoms):
        gg = embed(transition_op(0, 0, 2), i, layout).mat
        rr = embed(transition_op(1, 1, 2), i, layout).mat
        ground_shift = (p.omega_r[i] ** 2 / p.delta_a) * eye - (p.g**2 / p.delta_b) * n_phot
        h += ground_shift @ gg
        h += (p.omega_b[i] ** 2 / p.delta_a - p.omega_c[i] ** 2 / p.delta_b) * rr
    return OperatorMatrix(layout, h)


def build_effective_hamiltonian(p: PhysicalParams) -> OperatorMatrix:
    """Raman-reduced two-level Hamiltonian with the explicit pair-shift term."""
    layout = tier_layout(ModelTier.EFFECTIVE_CAVITY, p)
    dp = derive(p)
    a = embed(annihilation(p.fock_dim).mat, layout.n_sites - 1, layout).mat
    d = layout.total_dim
    h = np.zeros((d, d), dtype=complex)
    for i in range(p.n_atoms):
        rg = embed(transition_op(0, 1, 2), i, layout).mat  # |r><g|
        h += dp.omega_eff_i[i] * rg + dp.g_eff_i[i] * (rg @ a)
    h = h + h.conj().T
    h += _pair_shift(layout, p.n_atoms, p.u_effective, 1)
    return OperatorMatrix(layout, h)


def collective_lowering(layout: SpaceLayout, weights) -> Array:
    """|g...g> sum_i w_i <g...r_i...g| on a two-level atomic register.

    Annihilates everything outside the zero/one-excitation sector by
    construction, hence is exactly nilpotent of order two.
    """
    ground = product_ket(layout, [0] * layout.n_sites)
    op = np.zeros((layout.total_dim, layout.total_dim), dtype=complex)
    for i, w in enumerate(weights):
        levels = [0] * layout.n_sites
        levels[i] = 1
        op += w * np.outer(ground, product_ket(layout, levels).conj())
    return op


def build_collective_ops(p: PhysicalParams) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Laser- and cavity-weighted collective lowering operators (atoms only)."""
    dp = derive(p)
    if dp.omega_eff == 0.0:
        raise ValueError("collective operators undefined: omega_eff = 0")
    if dp.g_eff == 0.0:
        raise ValueError("collective operators undefined: g_eff = 0")
    layout = atoms_layout(p.n_atoms, 2)
    j_l = collective_lowering(layout, [w / dp.omega_eff for w in dp.omega_eff_i])
    j_c = collective_lowering(layout, [w / dp.g_eff for w in dp.g_eff_i])
    return OperatorMatrix(layout, j_l), OperatorMatrix(layout, j_c)


def flip_generator(layout: SpaceLayout, conditioned: bool = True) -> Array:
    """(|g><r| + |r><g|) on atom 1, optionally projected on all other atoms
    being in |g>.

    Works for two-level and three-level atomic sites (the flip couples the
    ground and Rydberg levels either way). The conditioned form is what the
    blockade turns the raw pulse into; the unconditioned form is the raw
    pulse itself, the right model when no blockade protects the flip.
    """
    n_atoms = layout.n_atoms
    dims = layout.site_dims
    excited = 1 if dims[0] == 2 else R
    flip = transition_op(G, excited, dims[0]).mat
    flip = flip + flip.conj().T
    gen = embed(flip, 0, layout).mat
    if conditioned:
        for i in range(1, n_atoms):
            gen = gen @ embed(transition_op(G, G, dims[i]), i, layout).mat
    return gen


def build_feedback_unitary(
    p: PhysicalParams,
    variant: FeedbackVariant | str | None = None,
    layout: SpaceLayout | None = None,
    delta_t: float | None = None,
) -> OperatorMatrix:
    """Unitary applied to the atoms right after each detected photon.

    CONDITIONED: exp[-i w (|g><r|+|r><g|)_1 P_g^others], the controlled flip
    of atom 1 that the blockade makes equivalent to the raw pulse.
    UNCONDITIONED: exp[-i w (|g><r|+|r><g|)_1], the raw pulse, appropriate
    when the blockade is off. EXACT (bipartite only):
    exp[-i (lam sigma_x^1 + u |rr><rr|) dt] with lam = w / dt, the
    finite-duration pulse in the presence of the pair shift.

    With variant=None the choice follows blockade_on: conditioned when the
    blockade protects the pulse, unconditioned otherwise.
    """
    if variant is None:
        variant = (FeedbackVariant.CONDITIONED if p.blockade_on
                   else FeedbackVariant.UNCONDITIONED)
    variant = FeedbackVariant(variant)
    if layout is None:
        layout = atoms_layout(p.n_atoms, 2)
    omega = p.feedback_angle
    if variant in (FeedbackVariant.CONDITIONED, FeedbackVariant.UNCONDITIONED):
        gen = flip_generator(layout, conditioned=variant is FeedbackVariant.CONDITIONED)
        return OperatorMatrix(layout, expm(-1j * omega * gen))
    if p.n_atoms != 2:
        raise ValueError("the exact finite-pulse form is only defined for two atoms")
    if delta_t is None or delta_t <= 0:
        raise ValueError("the exact variant needs a positive pulse duration")
    if layout.site_dims[0] != 2 or layout.n_atoms != 2:
        raise ValueError("exact variant expects a bare two-atom two-level layout")
    lam = omega / delta_t
    excited = 1
    flip = transition_op(G, excited, 2).mat
    flip = flip + flip.conj().T
    gen = lam * embed(flip, 0, layout).mat
    rr = product_ket(layout, [excited] * 2)
    gen = gen + p.u * np.outer(rr, rr.conj())
    return OperatorMatrix(layout, expm(-1j * gen * delta_t))


def ground_state(layout: SpaceLayout) -> Array:
    """All atoms in |g>, zero photons."""
    return product_ket(layout, [0] * layout.n_sites)


def double_excitation_projector(layout: SpaceLayout) -> Array:
    """sum_{i<j} |r><r|_i |r><r|_j, the weight outside the blockade sector."""
    excited = [d - 1 if d == 2 else R for d in layout.atom_dims]
    projs = [embed(transition_op(e, e, layout.site_dims[i]), i, layout).mat
             for i, e in enumerate(excited)]
    d = layout.total_dim
    out = np.zeros((d, d), dtype=complex)
    for i in range(layout.n_atoms):
        for j in range(i + 1, layout.n_atoms):
            out += projs[i] @ projs[j]
    return out


def with_feedback_angle(p: PhysicalParams, omega: float) -> PhysicalParams:
    return replace(p, feedback_angle=omega)
