"""Dissipative stabilization of multipartite entanglement with quantum-jump
feedback on Rydberg atoms in a lossy cavity: model builders, master-equation
tiers, propagators, steady-state analysis, and scenario presets."""

from .ops import (
    DensityMatrix,
    OperatorMatrix,
    SpaceLayout,
    annihilation,
    embed,
    hermitian_sqrt,
    partial_trace,
    project_subspace,
    tensor,
    transition_op,
)
from .model import (
    DerivedParams,
    FeedbackVariant,
    ModelTier,
    PhysicalParams,
    build_collective_ops,
    build_effective_hamiltonian,
    build_feedback_unitary,
    build_full_hamiltonian,
    build_stark_hamiltonian,
    derive,
    reduced_params,
)
from .liouville import (
    Liouvillian,
    assemble,
    dissipator,
    feedback_dissipator,
    split_dissipator,
    to_matrix,
)
from .evolve import (
    EnsembleResult,
    IntegrationError,
    TimeGrid,
    TimeSeries,
    TrajectoryResult,
    evolve_adaptive,
    evolve_expm,
    evolve_rk4,
    jump_trajectory,
    trajectory_mean,
)
from .steady import (
    SteadyResult,
    null_space_steady,
    residual_matrix,
    verify_claimed_steady,
)
from .states import TargetKind, TargetState, fidelity, population, target_state

__version__ = "0.1.0"
