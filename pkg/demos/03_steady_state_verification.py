"""Check the closed-form stationarity claim: the dark state of the collective
jump operator zeroes the 3x3 steady-state matrix for every atom number, and
the reduced feedback generator has it as its unique null vector.

Run:  python3 demos/03_steady_state_verification.py   (about a second)
"""

import math

import numpy as np

from rydstab import ModelTier, assemble, null_space_steady, residual_matrix
from rydstab.steady import reduced_tier_params

dark = np.zeros((3, 3), complex)
dark[2, 2] = 1.0

print(f"{'n':>2} {'omega':>8} {'drive':>6} {'residual':>10} {'null dim':>8} {'dark pop':>9}")
for n in range(2, 9):
    for omega in (math.pi / 4, math.pi / 2):
        for drive in (0.25, 5.0):
            resid = np.abs(residual_matrix(dark, n, omega, drive, 1.0)).max()
            liou = assemble(reduced_tier_params(n, omega, drive),
                            ModelTier.FEEDBACK_REDUCED)
            steady = null_space_steady(liou)
            print(f"{n:2d} {omega / math.pi:7.2f}p {drive:6.2f} {resid:10.1e} "
                  f"{steady.null_dim:8d} {steady.rho_ss.mat[2, 2].real:9.6f}")

print("\nwithout feedback the stationary manifold degenerates; the solver")
print("reports it instead of silently picking a state:")
import warnings

liou = assemble(reduced_tier_params(3, 0.0, 1.0), ModelTier.FEEDBACK_REDUCED)
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    steady = null_space_steady(liou, seed_state=np.array([1, 0, 0], complex))
print(f"null dimension {steady.null_dim}, unique={steady.unique}; "
      f"seeded populations {np.round(np.diag(steady.rho_ss.mat).real, 4)}")
print(f"warning raised: {caught[0].message}")
