"""Martinet geodesic Hamiltonian and its exact derivatives.

The model is the normal form H(q, p) = ((px + pz*y^2/2)^2 + (py/(1+beta*x))^2)/2
on R^3 x R^3 with q = (x, y, z) and p = (px, py, pz).  beta = 0 is the flat
case; small negative beta perturbs the metric.  The normal form is only valid
where 1 + beta*x > 0, and every evaluation enforces that guard.

All derivatives are hand-differentiated closed forms, so the variational
propagation downstream is exactly consistent with the step maps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import NamedTuple, Optional, Tuple

import numpy as np

from . import _kernels as _k

# initial data used throughout the experiments: position at the origin,
# momentum (cos theta0, sin theta0, pz)
DEFAULT_THETA0 = math.pi - 1e-3
DEFAULT_PZ = 10.0


class MetricDomainError(ValueError):
    """Raised when an evaluation point leaves the metric's validity region.

    The normal form requires 1 + beta*x > 0; crossing that surface makes the
    Hamiltonian singular rather than merely inaccurate.
    """


@dataclass(frozen=True)
class PhaseState:
    """Full phase-space point (q, p) with q = (x, y, z), p = (px, py, pz)."""

    x: float
    y: float
    z: float
    px: float
    py: float
    pz: float

    def __post_init__(self):
        for f in fields(self):
            v = float(getattr(self, f.name))
            if not math.isfinite(v):
                raise ValueError(f"PhaseState field {f.name} must be finite, got {v!r}")
            object.__setattr__(self, f.name, v)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z, self.px, self.py, self.pz])

    @classmethod
    def from_array(cls, arr) -> "PhaseState":
        a = np.asarray(arr, dtype=float)
        if a.shape != (6,):
            raise ValueError(f"expected 6 components, got shape {a.shape}")
        return cls(a[0], a[1], a[2], a[3], a[4], a[5])


@dataclass(frozen=True)
class ProblemParams:
    """Metric perturbation parameter. beta = 0 selects the flat metric."""

    beta: float = 0.0

    def __post_init__(self):
        b = float(self.beta)
        if not math.isfinite(b):
            raise ValueError(f"beta must be finite, got {self.beta!r}")
        object.__setattr__(self, "beta", b)

    @property
    def is_flat(self) -> bool:
        return self.beta == 0.0


class GradientPair(NamedTuple):
    hq: np.ndarray  # dH/dq; third component identically 0
    hp: np.ndarray  # dH/dp


class HessianBlocks(NamedTuple):
    hqq: np.ndarray  # d2H/dq dq, symmetric
    hqp: np.ndarray  # d2H/dq dp (hpq is its transpose)
    hpp: np.ndarray  # d2H/dp dp, symmetric


def launch_state(theta0: float = DEFAULT_THETA0, pz: float = DEFAULT_PZ) -> PhaseState:
    """Initial condition at the origin with momentum on the unit circle in
    (px, py) and vertical component pz.  H = 1/2 for every theta0."""
    return PhaseState(0.0, 0.0, 0.0, math.cos(theta0), math.sin(theta0), pz)


def _check_domain(x: float, beta: float) -> None:
    if 1.0 + beta * x <= 0.0:
        raise MetricDomainError(
            f"metric factor 1 + beta*x = {1.0 + beta * x!r} <= 0 at x = {x!r}"
        )


def hamiltonian(state: PhaseState, params: ProblemParams) -> float:
    _check_domain(state.x, params.beta)
    arr = state.as_array()
    return float(_k.hamiltonian_value(arr[:3], arr[3:], params.beta))


def gradients(state: PhaseState, params: ProblemParams) -> GradientPair:
    """First partials (dH/dq, dH/dp).

    hp is the velocity (qdot) and -hq the momentum rate (pdot) of the
    Hamiltonian flow.
    """
    _check_domain(state.x, params.beta)
    arr = state.as_array()
    hq, hp = _k.gradient_arrays(arr[:3], arr[3:], params.beta)
    return GradientPair(hq=hq, hp=hp)


def hessian(state: PhaseState, params: ProblemParams) -> HessianBlocks:
    """Exact second partials of H as 3x3 blocks (hqq, hqp, hpp)."""
    _check_domain(state.x, params.beta)
    arr = state.as_array()
    A, B, C = _k.hessian_arrays(arr[:3], arr[3:], params.beta)
    return HessianBlocks(hqq=A, hqp=B, hpp=C)


def flat_stationary_points(px: float, pz: float) -> Optional[Tuple[float, float]]:
    """Stationary y-values of the reduced flat-case (y, py) system.

    For px < 0 < pz the reduced potential has two minima at
    y = +/- sqrt(-2 px / pz) and the origin is a saddle; otherwise there is
    no such pair and None is returned.
    """
    if px < 0.0 < pz:
        r = math.sqrt(-2.0 * px / pz)
        return (r, -r)
    return None
