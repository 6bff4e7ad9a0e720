"""Dense complex operator algebra on composite Hilbert spaces.

Conventions used throughout the package:

* atomic levels are indexed |g> = 0, |p> = 1, |r> = 2 (two-level sites use
  |g> = 0, |r> = 1),
* composite spaces list atom sites first and the (single, optional) truncated
  Fock mode last,
* everything is a dense complex ndarray; the largest space in scope is a few
  hundred dimensions, so sparse formats are deliberately avoided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

Array = np.ndarray

HERM_TOL = 1e-10
TRACE_TOL = 1e-9
PSD_TOL = 1e-8


@dataclass(frozen=True)
class SpaceLayout:
    """Ordered subsystem dimensions, with an optional Fock mode in last place."""

    site_dims: tuple[int, ...]
    has_fock: bool = False

    def __post_init__(self):
        if not self.site_dims:
            raise ValueError("layout needs at least one site")
        if any(d < 2 for d in self.site_dims):
            raise ValueError(f"every site dimension must be >= 2, got {self.site_dims}")
        object.__setattr__(self, "site_dims", tuple(int(d) for d in self.site_dims))

    @property
    def total_dim(self) -> int:
        return math.prod(self.site_dims)

    @property
    def n_sites(self) -> int:
        return len(self.site_dims)

    @property
    def n_atoms(self) -> int:
        return self.n_sites - (1 if self.has_fock else 0)

    @property
    def fock_dim(self) -> int | None:
        return self.site_dims[-1] if self.has_fock else None

    @property
    def atom_dims(self) -> tuple[int, ...]:
        return self.site_dims[: self.n_atoms]

    def concat(self, other: "SpaceLayout") -> "SpaceLayout":
        if self.has_fock:
            raise ValueError("cannot append sites after a Fock mode")
        return SpaceLayout(self.site_dims + other.site_dims, other.has_fock)

    def atoms_only(self) -> "SpaceLayout":
        if not self.has_fock:
            return self
        return SpaceLayout(self.atom_dims, False)


def atoms_layout(n_atoms: int, n_levels: int = 2) -> SpaceLayout:
    return SpaceLayout((n_levels,) * n_atoms, False)


def cavity_layout(n_atoms: int, n_levels: int, fock_dim: int) -> SpaceLayout:
    return SpaceLayout((n_levels,) * n_atoms + (fock_dim,), True)


@dataclass(frozen=True)
class OperatorMatrix:
    """A square complex matrix tagged with the layout it acts on."""

    layout: SpaceLayout
    mat: Array

    def __post_init__(self):
        m = np.asarray(self.mat, dtype=complex)
        d = self.layout.total_dim
        if m.shape != (d, d):
            raise ValueError(f"matrix shape {m.shape} does not match layout dimension {d}")
        object.__setattr__(self, "mat", m)

    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.layout, self.mat.conj().T)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        _same_layout(self, other)
        return OperatorMatrix(self.layout, self.mat @ other.mat)

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        _same_layout(self, other)
        return OperatorMatrix(self.layout, self.mat + other.mat)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        _same_layout(self, other)
        return OperatorMatrix(self.layout, self.mat - other.mat)

    def __mul__(self, scalar: complex) -> "OperatorMatrix":
        return OperatorMatrix(self.layout, self.mat * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "OperatorMatrix":
        return OperatorMatrix(self.layout, -self.mat)


def _same_layout(a: OperatorMatrix, b: OperatorMatrix):
    if a.layout != b.layout:
        raise ValueError(f"layout mismatch: {a.layout} vs {b.layout}")


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite state on a layout.

    Construction validates the invariants (Hermiticity to 1e-10, trace to
    1e-9, minimum eigenvalue >= -1e-8) so integrator output gets checked the
    moment it is wrapped.
    """

    layout: SpaceLayout
    mat: Array

    def __post_init__(self):
        m = np.asarray(self.mat, dtype=complex)
        d = self.layout.total_dim
        if m.shape != (d, d):
            raise ValueError(f"matrix shape {m.shape} does not match layout dimension {d}")
        herm = np.abs(m - m.conj().T).max()
        if herm > HERM_TOL:
            raise ValueError(f"density matrix not Hermitian: defect {herm:.3e}")
        tr = m.trace()
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace {tr} is not 1")
        min_eig = float(np.linalg.eigvalsh((m + m.conj().T) / 2).min())
        if min_eig < -PSD_TOL:
            raise ValueError(f"density matrix not PSD: min eigenvalue {min_eig:.3e}")
        object.__setattr__(self, "mat", m)

    @classmethod
    def pure(cls, layout: SpaceLayout, vec: Array) -> "DensityMatrix":
        v = np.asarray(vec, dtype=complex).ravel()
        v = v / np.linalg.norm(v)
        return cls(layout, np.outer(v, v.conj()))


def ket(dim: int, level: int) -> Array:
    if not 0 <= level < dim:
        raise ValueError(f"level {level} out of range for dimension {dim}")
    v = np.zeros(dim, dtype=complex)
    v[level] = 1.0
    return v


def product_ket(layout: SpaceLayout, levels) -> Array:
    """|levels[0]> x |levels[1]> x ... on the given layout."""
    if len(levels) != layout.n_sites:
        raise ValueError(f"need {layout.n_sites} site levels, got {len(levels)}")
    v = np.ones(1, dtype=complex)
    for d, l in zip(layout.site_dims, levels):
        v = np.kron(v, ket(d, l))
    return v


def identity(layout: SpaceLayout) -> OperatorMatrix:
    return OperatorMatrix(layout, np.eye(layout.total_dim, dtype=complex))


def tensor(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    """Kronecker product; the result layout concatenates the input layouts."""
    return OperatorMatrix(a.layout.concat(b.layout), np.kron(a.mat, b.mat))


def embed(site_op, site_index: int, layout: SpaceLayout) -> OperatorMatrix:
    """Lift a single-site operator to the full layout (identity elsewhere)."""
    mat = site_op.mat if isinstance(site_op, OperatorMatrix) else np.asarray(site_op, dtype=complex)
    if not 0 <= site_index < layout.n_sites:
        raise ValueError(f"site index {site_index} out of range")
    d_site = layout.site_dims[site_index]
    if mat.shape != (d_site, d_site):
        raise ValueError(
            f"operator dimension {mat.shape[0]} does not match site dimension {d_site}"
        )
    left = math.prod(layout.site_dims[:site_index])
    right = math.prod(layout.site_dims[site_index + 1 :])
    full = np.kron(np.kron(np.eye(left), mat), np.eye(right))
    return OperatorMatrix(layout, full)


def transition_op(from_level: int, to_level: int, n_levels: int) -> OperatorMatrix:
    """Single-site |to><from|."""
    if not (0 <= from_level < n_levels and 0 <= to_level < n_levels):
        raise ValueError(f"levels ({from_level}, {to_level}) out of range for {n_levels} levels")
    m = np.zeros((n_levels, n_levels), dtype=complex)
    m[to_level, from_level] = 1.0
    return OperatorMatrix(SpaceLayout((n_levels,)), m)


def annihilation(fock_dim: int) -> OperatorMatrix:
    """Truncated ladder operator with <m-1|a|m> = sqrt(m)."""
    if fock_dim < 2:
        raise ValueError("Fock dimension must be >= 2")
    m = np.zeros((fock_dim, fock_dim), dtype=complex)
    for n in range(1, fock_dim):
        m[n - 1, n] = math.sqrt(n)
    return OperatorMatrix(SpaceLayout((fock_dim,), has_fock=True), m)


def hermitian_sqrt(m) -> OperatorMatrix | Array:
    """PSD square root via eigendecomposition.

    Eigenvalues in [-1e-10, 0) are clamped to zero; integration round-off
    routinely produces them. Inputs that are not Hermitian (or have more
    negative spectrum) are rejected.
    """
    mat = m.mat if isinstance(m, OperatorMatrix) else np.asarray(m, dtype=complex)
    herm = np.abs(mat - mat.conj().T).max()
    if herm > HERM_TOL:
        raise ValueError(f"hermitian_sqrt: input not Hermitian (defect {herm:.3e})")
    vals, vecs = np.linalg.eigh((mat + mat.conj().T) / 2)
    if vals.min() < -HERM_TOL:
        raise ValueError(f"hermitian_sqrt: input not PSD (min eigenvalue {vals.min():.3e})")
    root = (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T
    if isinstance(m, OperatorMatrix):
        return OperatorMatrix(m.layout, root)
    return root


def project_subspace(op, basis) -> Array:
    """B^dag op B for a column-stacked orthonormal basis B (k vectors)."""
    mat = op.mat if isinstance(op, OperatorMatrix) else np.asarray(op, dtype=complex)
    b = np.column_stack([np.asarray(v, dtype=complex).ravel() for v in basis])
    if b.shape[0] != mat.shape[0]:
        raise ValueError("basis vectors do not live in the operator's space")
    gram = b.conj().T @ b
    if np.abs(gram - np.eye(b.shape[1])).max() > HERM_TOL:
        raise ValueError("basis is not orthonormal")
    return b.conj().T @ mat @ b


def partial_trace_mat(mat: Array, dims, keep_sites) -> Array:
    """Partial trace of a matrix over the sites not in keep_sites."""
    dims = tuple(dims)
    k = len(dims)
    keep = sorted(set(int(s) for s in keep_sites))
    if any(not 0 <= s < k for s in keep):
        raise ValueError(f"keep_sites {keep_sites} out of range for {k} sites")
    t = mat.reshape(dims + dims)
    # trace out sites from the back so axis numbers stay valid
    for site in sorted(set(range(k)) - set(keep), reverse=True):
        t = np.trace(t, axis1=site, axis2=site + t.ndim // 2)
    d_keep = math.prod(dims[s] for s in keep) if keep else 1
    return t.reshape(d_keep, d_keep)


def partial_trace(rho: DensityMatrix, keep_sites) -> DensityMatrix:
    reduced = partial_trace_mat(rho.mat, rho.layout.site_dims, keep_sites)
    keep = sorted(set(int(s) for s in keep_sites))
    has_fock = rho.layout.has_fock and (rho.layout.n_sites - 1) in keep
    layout = SpaceLayout(tuple(rho.layout.site_dims[s] for s in keep), has_fock)
    return DensityMatrix(layout, reduced)
