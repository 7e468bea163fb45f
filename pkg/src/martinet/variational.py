"""Sensitivity propagation and first-conjugate-point detection.

The tangent block Psi_n = d(q_n, p_n)/d(p_0) is advanced with the exact
Jacobian of the discrete step map (chain rule through every substage; for the
implicit Verlet substeps the linearized relations are solved at the converged
point).  A conjugate point is flagged where det(dq/dp0) changes sign along
the trajectory and located by linear interpolation between the bracketing
grid times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import _kernels as _k
from .hamiltonian import PhaseState, ProblemParams
from .integrators import Method, MethodLike, StepConfig, _method_id, _raise_step_error, step_count

# det(dq/dp0) vanishes to high order at t = 0, so the first recorded values
# are pure rounding noise with arbitrary sign.  The sign-change scan only
# starts once |det| has reached this fraction of its global maximum.
ARMING_RATIO = 1e-8


@dataclass(frozen=True)
class TangentBlock:
    """Matrix of sensitivities of (q, p) to initial conditions.

    The canonical block is 6x3 (columns = d/dpx0, d/dpy0, d/dpz0) starting
    from zero positions over the identity.  A full 6x6 variant (columns over
    all of (q0, p0)) is accepted everywhere for Jacobian-level diagnostics.
    """

    m: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.m, dtype=float)
        if a.shape not in ((6, 3), (6, 6)):
            raise ValueError(f"tangent must be 6x3 or 6x6, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("tangent entries must be finite")
        object.__setattr__(self, "m", a)

    @classmethod
    def initial(cls) -> "TangentBlock":
        m = np.zeros((6, 3))
        m[3:, :] = np.eye(3)
        return cls(m)

    @classmethod
    def identity6(cls) -> "TangentBlock":
        return cls(np.eye(6))


@dataclass(frozen=True)
class ConjugateEvent:
    """A detected sign change of det(dq/dp0) and its interpolated time.

    Generically det_lo * det_hi < 0 and t_lo < t1 < t_hi with
    t_hi - t_lo = h.  In the measure-zero case of an exact zero at a grid
    point, t1 equals that grid time and det_lo is 0.
    """

    t_lo: float
    t_hi: float
    det_lo: float
    det_hi: float
    t1: float


def det_dq_dp0(tangent: TangentBlock) -> float:
    """Determinant of the dq/dp0 block.

    For the canonical 6x3 block that is the top 3x3 submatrix; for a 6x6
    block the p0 columns are the last three.
    """
    m = tangent.m
    block = m[:3, 3:] if m.shape[1] == 6 else m[:3, :3]
    return float(_k.det3(np.ascontiguousarray(block)))


def step_tangent(
    state: PhaseState,
    tangent: TangentBlock,
    params: ProblemParams,
    cfg: StepConfig,
    method: MethodLike,
) -> Tuple[PhaseState, TangentBlock]:
    """Advance state and tangent together by one step of the chosen method.

    The tangent update is the exact differential of the implemented step map,
    so it matches finite differences of the stepper to rounding.
    """
    y = state.as_array()
    T = np.ascontiguousarray(tangent.m)
    if Method(method) is Method.RK2:
        y1, T1, status = _k.rk2_step_tangent_kernel(y, T, cfg.h, params.beta)
    else:
        y1, T1, status = _k.verlet_step_tangent_kernel(
            y, T, cfg.h, params.beta, cfg.fp_tol, cfg.fp_max_iters
        )
    if status != _k.OK:
        _raise_step_error(status)
    return PhaseState.from_array(y1), TangentBlock(T1)


def _det_series(
    state0: PhaseState,
    params: ProblemParams,
    cfg: StepConfig,
    t_end: float,
    method: MethodLike,
) -> np.ndarray:
    """det(dq/dp0) at every grid time over [0, t_end], from the canonical
    initial tangent."""
    n = step_count(t_end, cfg.h)
    dets, _, _, status, fail_step = _k.det_series_loop(
        state0.as_array(), TangentBlock.initial().m, cfg.h, n, params.beta,
        _method_id(method), cfg.fp_tol, cfg.fp_max_iters,
    )
    if status != _k.OK:
        _raise_step_error(status, fail_step)
    return dets


def _scan_sign_change(dets: np.ndarray, h: float) -> Optional[ConjugateEvent]:
    """Locate the first trustworthy sign change in a determinant series.

    The t = 0 sample is exactly zero and the next few are rounding noise of
    arbitrary sign (the determinant vanishes to high order at the origin), so
    brackets are only accepted once |det| has climbed to ARMING_RATIO times
    the series' global maximum.
    """
    n_samples = len(dets)
    if n_samples < 2:
        return None
    peak = float(np.max(np.abs(dets[1:])))
    if peak == 0.0 or not math.isfinite(peak):
        return None
    floor = ARMING_RATIO * peak
    start = 0
    for i in range(1, n_samples):
        if abs(dets[i]) >= floor:
            start = i
            break
    else:
        return None
    for i in range(start, n_samples - 1):
        d0 = float(dets[i])
        d1 = float(dets[i + 1])
        if d0 == 0.0:
            return ConjugateEvent(
                t_lo=i * h, t_hi=(i + 1) * h, det_lo=d0, det_hi=d1, t1=i * h
            )
        if d0 * d1 < 0.0:
            t_lo = i * h
            t1 = t_lo + h * d0 / (d0 - d1)
            return ConjugateEvent(
                t_lo=t_lo, t_hi=(i + 1) * h, det_lo=d0, det_hi=d1, t1=t1
            )
    if dets[n_samples - 1] == 0.0 and n_samples - 1 >= start:
        t = (n_samples - 1) * h
        return ConjugateEvent(
            t_lo=t, t_hi=t, det_lo=0.0, det_hi=0.0, t1=t
        )
    return None


def find_first_conjugate(
    state0: PhaseState,
    params: ProblemParams,
    cfg: StepConfig,
    t_end: float,
    method: MethodLike,
) -> Optional[ConjugateEvent]:
    """First sign change of det(dq/dp0) over [0, t_end], or None.

    Integrates state and tangent jointly from the canonical initial tangent,
    then scans the recorded determinant series (t = 0 excluded) for the first
    sign change and interpolates t1 linearly inside the bracketing step.
    """
    dets = _det_series(state0, params, cfg, t_end, method)
    return _scan_sign_change(dets, cfg.h)
