"""Target entangled states and the scalar observables reported by scenarios."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .ops import (
    Array,
    DensityMatrix,
    SpaceLayout,
    atoms_layout,
    hermitian_sqrt,
    partial_trace_mat,
    product_ket,
)


class TargetKind(Enum):
    BELL_ANTISYM = "bell_antisym"
    BELL_THETA = "bell_theta"
    DFS = "dfs"
    W = "w"


@dataclass(frozen=True)
class TargetState:
    kind: TargetKind
    n_atoms: int
    vector: Array
    layout: SpaceLayout
    theta: float | None = None


def single_excitation_ket(layout: SpaceLayout, atom: int) -> Array:
    """|g...r_atom...g> on a register of two-level atoms."""
    levels = [0] * layout.n_sites
    levels[atom] = 1
    return product_ket(layout, levels)


def target_state(kind: TargetKind | str, n: int = 2, theta: float | None = None) -> TargetState:
    """Construct the stabilization targets on an n-atom two-level register.

    W(n) is the symmetric single-excitation state; DFS(n) carries amplitude
    -(n-1) on atom 1 (the feedback-controlled atom) against +1 on every other
    single excitation, normalized by sqrt(n(n-1)).
    """
    kind = TargetKind(kind)
    if n < 2:
        raise ValueError("target states need n >= 2 atoms")
    layout = atoms_layout(n)
    singles = [single_excitation_ket(layout, i) for i in range(n)]

    if kind is TargetKind.BELL_ANTISYM:
        if n != 2:
            raise ValueError("antisymmetric Bell state is bipartite")
        vec = (singles[1] - singles[0]) / math.sqrt(2)  # (|gr> - |rg>)/sqrt(2)
    elif kind is TargetKind.BELL_THETA:
        if n != 2:
            raise ValueError("theta-family Bell state is bipartite")
        if theta is None:
            raise ValueError("BELL_THETA needs theta")
        vec = math.cos(theta) * singles[1] + math.sin(theta) * singles[0]
    elif kind is TargetKind.W:
        vec = sum(singles) / math.sqrt(n)
    elif kind is TargetKind.DFS:
        vec = (sum(singles[1:]) - (n - 1) * singles[0]) / math.sqrt(n * (n - 1))
    else:  # pragma: no cover
        raise ValueError(f"unknown target kind {kind}")

    nrm = np.linalg.norm(vec)
    if abs(nrm - 1.0) > 1e-12:
        raise AssertionError("target state lost normalization")
    return TargetState(kind, n, vec, layout, theta)


def state_fidelity(psi: Array, rho: Array) -> float:
    """sqrt(<psi|rho|psi>), the Uhlmann fidelity for a pure target."""
    psi = np.asarray(psi, dtype=complex).ravel()
    val = float(np.real(psi.conj() @ rho @ psi))
    return math.sqrt(max(val, 0.0))


def fidelity(sigma: DensityMatrix, rho: DensityMatrix) -> float:
    """Uhlmann fidelity Tr sqrt(sqrt(sigma) rho sqrt(sigma))."""
    if sigma.layout != rho.layout:
        raise ValueError("fidelity: layouts do not match")
    root = hermitian_sqrt(sigma.mat)
    inner = root @ rho.mat @ root
    # clamp near-singular eigenvalues (threshold 1e-12) before the square
    # root; sqrt amplifies the numerical floor badly otherwise
    vals = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    vals[vals < 1e-12] = 0.0
    return float(np.sqrt(vals).sum())


def _atom_reduced(rho_mat: Array, layout: SpaceLayout) -> Array:
    if not layout.has_fock:
        return rho_mat
    return partial_trace_mat(rho_mat, layout.site_dims, range(layout.n_atoms))


def population(rho: DensityMatrix, psi: Array, psi_layout: SpaceLayout | None = None) -> float:
    """<psi|rho|psi>, tracing the Fock mode out of rho first if psi is atom-only."""
    psi = np.asarray(psi, dtype=complex).ravel()
    if psi.size == rho.layout.total_dim:
        reduced = rho.mat
    else:
        reduced = _atom_reduced(rho.mat, rho.layout)
        if psi.size != reduced.shape[0]:
            raise ValueError(
                f"state of dimension {psi.size} fits neither the full ({rho.layout.total_dim}) "
                f"nor the atom-reduced ({reduced.shape[0]}) space"
            )
    return float(np.real(psi.conj() @ reduced @ psi))


def population_mat(rho_mat: Array, layout: SpaceLayout, psi: Array) -> float:
    """population() for raw matrices, used in integrator observable hooks."""
    psi = np.asarray(psi, dtype=complex).ravel()
    if psi.size == rho_mat.shape[0]:
        return float(np.real(psi.conj() @ rho_mat @ psi))
    reduced = _atom_reduced(rho_mat, layout)
    return float(np.real(psi.conj() @ reduced @ psi))


def lift_two_level_state(vec: Array, n_atoms: int, n_levels: int = 3) -> Array:
    """Map an n-qubit state onto n d-level atoms, |g> -> 0 and |r> -> top level.

    Used to express the stabilization targets on the three-level register of
    the full cascade model, where the Rydberg level is index 2.
    """
    vec = np.asarray(vec, dtype=complex).ravel()
    if vec.size != 2**n_atoms:
        raise ValueError(f"expected a {n_atoms}-qubit state, got dimension {vec.size}")
    out = np.zeros(n_levels**n_atoms, dtype=complex)
    for idx in range(vec.size):
        if vec[idx] == 0:
            continue
        new_idx = 0
        for site in range(n_atoms):
            bit = (idx >> (n_atoms - 1 - site)) & 1
            new_idx = new_idx * n_levels + (n_levels - 1 if bit else 0)
        out[new_idx] = vec[idx]
    return out
