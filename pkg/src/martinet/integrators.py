"""Fixed-step one-step integrators for the geodesic Hamiltonian flow.

Two schemes are provided: a non-symplectic explicit midpoint rule (rk2) and
the symplectic Stormer-Verlet scheme (verlet).  Verlet is explicit in the
flat case thanks to the conservation of px and pz; for beta != 0 its two
implicit substeps are solved by fixed-point iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Union

import numpy as np

from . import _kernels as _k
from .hamiltonian import MetricDomainError, PhaseState, ProblemParams


class Method(str, Enum):
    RK2 = "rk2"
    VERLET = "verlet"


MethodLike = Union[Method, str]


def _method_id(method: MethodLike) -> int:
    m = Method(method)
    return _k.METHOD_RK2 if m is Method.RK2 else _k.METHOD_VERLET


class ConvergenceError(RuntimeError):
    """Fixed-point iteration failed to reach tolerance within the allowed
    iteration count."""

    def __init__(self, message: str, step_index: int = 0):
        super().__init__(message)
        self.step_index = step_index


class IntegrationError(RuntimeError):
    """A step failed mid-trajectory; carries the 1-based failing step index."""

    def __init__(self, message: str, step_index: int):
        super().__init__(message)
        self.step_index = step_index


@dataclass(frozen=True)
class StepConfig:
    """Step size and fixed-point iteration controls.

    h may be zero or negative for single-step uses (identity map, backward
    step in reversibility checks); integrate() itself requires h > 0.
    """

    h: float
    fp_tol: float = 1e-14
    fp_max_iters: int = 50

    def __post_init__(self):
        if not math.isfinite(self.h):
            raise ValueError(f"h must be finite, got {self.h!r}")
        if not (self.fp_tol > 0.0):
            raise ValueError(f"fp_tol must be > 0, got {self.fp_tol!r}")
        if self.fp_max_iters < 1:
            raise ValueError(f"fp_max_iters must be >= 1, got {self.fp_max_iters!r}")


@dataclass(frozen=True)
class Trajectory:
    """Equally spaced samples of a fixed-step integration.

    data holds the raw (N+1, 6) state array; states materializes PhaseState
    values on demand.  energies[n] is H at data[n], recorded during the run.
    """

    times: np.ndarray
    data: np.ndarray
    energies: np.ndarray
    method: str = ""
    beta: float = 0.0

    def __len__(self) -> int:
        return len(self.times)

    @property
    def h(self) -> float:
        if len(self.times) < 2:
            return float("nan")
        return float(self.times[1] - self.times[0])

    @property
    def states(self) -> List[PhaseState]:
        return [PhaseState.from_array(row) for row in self.data]


def _raise_step_error(status: int, step_index: int = 0):
    if status == _k.DOMAIN:
        msg = "metric factor 1 + beta*x became nonpositive"
        if step_index:
            raise IntegrationError(f"{msg} at step {step_index}", step_index)
        raise MetricDomainError(msg)
    if status == _k.FP_FAIL:
        msg = "fixed-point iteration did not converge"
        if step_index:
            raise IntegrationError(f"{msg} at step {step_index}", step_index)
        raise ConvergenceError(msg)
    raise RuntimeError(f"unknown step status {status}")


def rk2_step(state: PhaseState, params: ProblemParams, cfg: StepConfig) -> PhaseState:
    """One explicit midpoint step: Euler half-step to the midpoint, then a
    full step with the midpoint gradients."""
    y1, status = _k.rk2_step_kernel(state.as_array(), cfg.h, params.beta)
    if status != _k.OK:
        _raise_step_error(status)
    return PhaseState.from_array(y1)


def verlet_step(state: PhaseState, params: ProblemParams, cfg: StepConfig) -> PhaseState:
    """One Stormer-Verlet step: implicit momentum half-kick, trapezoidal
    position update, explicit closing half-kick.

    With beta = 0 the conserved px, pz make the scheme explicit when the
    components are updated in the order py-half, y, x, z, py; that explicit
    path is used automatically.
    """
    y1, status = _k.verlet_step_kernel(
        state.as_array(), cfg.h, params.beta, cfg.fp_tol, cfg.fp_max_iters
    )
    if status != _k.OK:
        _raise_step_error(status)
    return PhaseState.from_array(y1)


def step_count(t_end: float, h: float) -> int:
    """Number of steps covering [0, t_end]; t_end must sit on the step grid."""
    if not (h > 0.0) or not math.isfinite(h):
        raise ValueError(f"h must be positive and finite, got {h!r}")
    if t_end < 0.0 or not math.isfinite(t_end):
        raise ValueError(f"t_end must be nonnegative and finite, got {t_end!r}")
    n = int(round(t_end / h))
    if abs(n * h - t_end) > 1e-12 * max(t_end, h):
        raise ValueError(
            f"t_end = {t_end!r} is not an integer multiple of h = {h!r}"
        )
    return n


def integrate(
    state0: PhaseState,
    params: ProblemParams,
    cfg: StepConfig,
    t_end: float,
    method: MethodLike,
) -> Trajectory:
    """Integrate from t = 0 to t_end with fixed step cfg.h.

    Returns N + 1 samples at t_n = n*h including the initial state, with the
    energy recorded at every sample.  Step failures raise IntegrationError
    carrying the failing step index.
    """
    n = step_count(t_end, cfg.h)
    m = Method(method)
    data, energies, status, fail_step = _k.integrate_loop(
        state0.as_array(), cfg.h, n, params.beta, _method_id(m),
        cfg.fp_tol, cfg.fp_max_iters,
    )
    if status != _k.OK:
        _raise_step_error(status, fail_step)
    times = np.arange(n + 1) * cfg.h
    return Trajectory(
        times=times, data=data, energies=energies, method=m.value, beta=params.beta
    )
