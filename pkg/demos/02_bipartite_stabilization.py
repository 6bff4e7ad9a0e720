"""Stabilize the antisymmetric Bell state with jump feedback, at two model
tiers: the cavity-resolved master equation and its collective-damping
reduction. Prints the fidelity trajectory side by side.

Run:  python3 demos/02_bipartite_stabilization.py   (a few seconds)
"""

import numpy as np

from rydstab import (
    DensityMatrix,
    ModelTier,
    TimeGrid,
    assemble,
    evolve_rk4,
    reduced_params,
    target_state,
)
from rydstab.model import ground_state
from rydstab.states import population_mat

# working point of the bipartite figure: damping rate 1, cavity decay 25,
# cavity coupling 2.5, pair shift 500, drive 0.25, half-pi feedback flips
params = reduced_params(
    2, omega_eff=0.25, g_eff=2.5, kappa=25.0, u=500.0,
    feedback_angle=0.5 * np.pi, fock_dim=2,
)

bell = target_state("bell_antisym", 2).vector
grid = TimeGrid(0.0, 60.0, dt=1e-3, sample_every=2000)

curves = {}
for tier in (ModelTier.FEEDBACK_REDUCED, ModelTier.EFFECTIVE_CAVITY):
    liou = assemble(params, tier)
    if tier is ModelTier.FEEDBACK_REDUCED:
        rho0 = DensityMatrix.pure(liou.layout, np.array([1, 0, 0], complex))
        tgt = liou.reduced_basis.conj().T @ bell
    else:
        rho0 = DensityMatrix.pure(liou.layout, ground_state(liou.layout))
        tgt = bell
    obs = {"F": lambda r, v=tgt, lay=liou.layout: np.sqrt(max(population_mat(r, lay, v), 0.0))}
    curves[tier.value] = evolve_rk4(liou, rho0, grid, obs)

times = curves["feedback_reduced"].times
print(f"{'time':>6}  {'reduced':>9}  {'cavity':>9}  {'gap':>8}")
for i in range(0, len(times), 5):
    f_red = curves["feedback_reduced"].records["F"][i]
    f_cav = curves["effective_cavity"].records["F"][i]
    print(f"{times[i]:6.1f}  {f_red:9.5f}  {f_cav:9.5f}  {abs(f_red - f_cav):8.5f}")

print("\nthe two tiers agree because the cavity decays much faster than the")
print("effective coupling here; crank omega_eff above g_eff and watch them split.")
