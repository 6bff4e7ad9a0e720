"""Tour of the operator layer: composite spaces, targets, and fidelity.

Run from the repository root:  python3 demos/01_operator_toolbox.py
"""

import numpy as np

from rydstab import (
    DensityMatrix,
    annihilation,
    embed,
    hermitian_sqrt,
    fidelity,
    partial_trace,
    target_state,
    transition_op,
)
from rydstab.ops import atoms_layout, cavity_layout, product_ket

# two two-level atoms plus a three-photon cavity mode
layout = cavity_layout(n_atoms=2, n_levels=2, fock_dim=3)
print(f"layout {layout.site_dims}, total dimension {layout.total_dim}")

# single-site operators lift onto the composite space with identities elsewhere
sigma_minus = transition_op(1, 0, 2)
lowering_atom2 = embed(sigma_minus, 1, layout)
a = embed(annihilation(3), 2, layout)

# |g r, 1 photon>: lower the atom, annihilate the photon
state = product_ket(layout, [0, 1, 1])
print("atom-2 lowering sends |g r, 1> to |g g, 1>:",
      np.allclose(lowering_atom2.mat @ state, product_ket(layout, [0, 0, 1])))
print("annihilation sends |g r, 1> to |g r, 0>:",
      np.allclose(a.mat @ state, product_ket(layout, [0, 1, 0])))

# the stabilization targets live on the bare atomic register
bell = target_state("bell_antisym", 2)
dfs3 = target_state("dfs", 3)
print("\nantisymmetric Bell amplitudes:", np.round(bell.vector, 4))
print("three-atom dark-state amplitudes:", np.round(dfs3.vector, 4))

# Uhlmann fidelity against a thermal-ish mixture
rho = DensityMatrix(atoms_layout(2), np.diag([0.4, 0.25, 0.25, 0.1]))
sigma = DensityMatrix.pure(atoms_layout(2), bell.vector)
print(f"\nfidelity(|Bell>, diag mixture) = {fidelity(sigma, rho):.6f}")

# partial trace: drop the cavity, keep the atoms
full = DensityMatrix.pure(layout, product_ket(layout, [0, 1, 2]))
atoms = partial_trace(full, keep_sites=[0, 1])
print("atom register after tracing the cavity:", np.round(np.diag(atoms.mat).real, 3))

# matrix square root round trip
m = np.diag([4.0, 9.0, 16.0])
print("hermitian sqrt of diag(4,9,16):", np.diag(hermitian_sqrt(m)).real)
