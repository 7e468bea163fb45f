"""Martinet sub-Riemannian geodesics: symplectic and non-symplectic fixed-step
integration with conjugate-point detection via variational equations."""

from .analysis import (
    DriftReport,
    REFERENCE_T1_FLAT,
    REFERENCE_T1_PERTURBED,
    SweepRecord,
    TableCell,
    auto_t_end,
    conjugate_time_table,
    default_eps_grid,
    drift_report,
    elliptic_K,
    pz_invariance_check,
    ratio_R,
    sweep_theta,
)
from .hamiltonian import (
    DEFAULT_PZ,
    DEFAULT_THETA0,
    GradientPair,
    HessianBlocks,
    MetricDomainError,
    PhaseState,
    ProblemParams,
    flat_stationary_points,
    gradients,
    hamiltonian,
    hessian,
    launch_state,
)
from .integrators import (
    ConvergenceError,
    IntegrationError,
    Method,
    StepConfig,
    Trajectory,
    integrate,
    rk2_step,
    verlet_step,
)
from .variational import (
    ConjugateEvent,
    TangentBlock,
    det_dq_dp0,
    find_first_conjugate,
    step_tangent,
)

__version__ = "0.1.0"

__all__ = [
    "ConjugateEvent",
    "ConvergenceError",
    "DEFAULT_PZ",
    "DEFAULT_THETA0",
    "DriftReport",
    "GradientPair",
    "HessianBlocks",
    "IntegrationError",
    "Method",
    "MetricDomainError",
    "PhaseState",
    "ProblemParams",
    "REFERENCE_T1_FLAT",
    "REFERENCE_T1_PERTURBED",
    "StepConfig",
    "SweepRecord",
    "TableCell",
    "TangentBlock",
    "Trajectory",
    "auto_t_end",
    "conjugate_time_table",
    "default_eps_grid",
    "det_dq_dp0",
    "drift_report",
    "elliptic_K",
    "find_first_conjugate",
    "flat_stationary_points",
    "gradients",
    "hamiltonian",
    "hessian",
    "integrate",
    "launch_state",
    "pz_invariance_check",
    "ratio_R",
    "rk2_step",
    "sweep_theta",
    "step_tangent",
    "verlet_step",
]
