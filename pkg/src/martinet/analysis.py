"""Conjugate-time studies: elliptic integral, asymptotic ratio, sweeps,
step-size table and energy-drift summaries.

The asymptotic study compares the detected first conjugate time t1 against
the closed-form combination 3K(k)/sqrt(pz), where K is the complete elliptic
integral of the first kind of modulus k = sin(theta0/2).  The ratio
R = t1*sqrt(pz)/(3K(k)) satisfies 2/3 <= R <= 1 and tends to 1 as theta0
approaches pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .hamiltonian import DEFAULT_PZ, DEFAULT_THETA0, ProblemParams, launch_state
from .integrators import Method, StepConfig, Trajectory
from .variational import find_first_conjugate

# reference first conjugate times for the two studied metrics (theta0 =
# pi - 1e-3, pz = 10), accurate to the printed digits
REFERENCE_T1_FLAT = 8.416409
REFERENCE_T1_PERTURBED = 4.876997

TABLE_STEPS = (1e-1, 1e-2, 1e-3, 1e-4)
TABLE_BETAS = (0.0, -1e-4)


def elliptic_K(k: float) -> float:
    """Complete elliptic integral of the first kind, by the AGM recursion.

    K(k) = pi / (2 * AGM(1, sqrt(1 - k^2))), valid for 0 <= k < 1; the AGM
    converges quadratically even for k near 1 where direct quadrature of the
    defining integral becomes stiff.
    """
    if not (0.0 <= k < 1.0):
        raise ValueError(f"elliptic modulus must satisfy 0 <= k < 1, got {k!r}")
    a = 1.0
    b = math.sqrt(1.0 - k * k)
    for _ in range(64):
        # 1e-15 relative agreement is ~1 ulp; a tighter cut never terminates
        if a - b <= 1e-15 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


def ratio_R(t1: float, pz: float, theta0: float) -> float:
    """Ratio R = t1*sqrt(pz) / (3*K(sin(theta0/2)))."""
    if not (t1 > 0.0):
        raise ValueError(f"t1 must be positive, got {t1!r}")
    if not (pz > 0.0):
        raise ValueError(f"pz must be positive, got {pz!r}")
    if not (0.0 < theta0 < math.pi):
        raise ValueError(f"theta0 must lie in (0, pi), got {theta0!r}")
    return t1 * math.sqrt(pz) / (3.0 * elliptic_K(math.sin(0.5 * theta0)))


@dataclass(frozen=True)
class SweepRecord:
    """One row of the theta0 sweep.  found is False when no conjugate point
    occurred before t_end; t1, R and one_minus_R are then NaN."""

    theta0: float
    eps: float
    t1: float
    k: float
    K: float
    R: float
    one_minus_R: float
    found: bool = True


def default_eps_grid() -> np.ndarray:
    """13 values of eps = pi - theta0, log-spaced from 1e-1 down to 1e-4."""
    return np.logspace(-1.0, -4.0, 13)


def auto_t_end(theta0: float, pz: float, h: float) -> float:
    """Integration horizon guaranteed to contain t1, rounded onto the step
    grid.  Since R <= 1 implies t1 <= 3K(k)/sqrt(pz), a 10% margin suffices."""
    bound = 1.1 * 3.0 * elliptic_K(math.sin(0.5 * theta0)) / math.sqrt(pz)
    return math.ceil(bound / h) * h


def sweep_theta(
    theta_list: Sequence[float],
    pz: float,
    cfg: StepConfig,
    t_end: Optional[float] = None,
) -> List[SweepRecord]:
    """Flat-case conjugate-time sweep over launch angles.

    Each theta0 is integrated with Verlet from the standard initial data and
    the detected t1 is combined with K(k) into the ratio R.  When t_end is
    None a per-angle horizon is chosen from the bound t1 <= 3K(k)/sqrt(pz);
    records where no conjugate point is found are flagged, not fatal.
    """
    params = ProblemParams(beta=0.0)
    records = []
    for theta0 in theta_list:
        if not (0.0 < theta0 < math.pi):
            raise ValueError(f"theta0 must lie in (0, pi), got {theta0!r}")
        k = math.sin(0.5 * theta0)
        K = elliptic_K(k)
        horizon = auto_t_end(theta0, pz, cfg.h) if t_end is None else t_end
        event = find_first_conjugate(
            launch_state(theta0, pz), params, cfg, horizon, Method.VERLET
        )
        if event is None:
            records.append(SweepRecord(
                theta0=theta0, eps=math.pi - theta0, t1=math.nan, k=k, K=K,
                R=math.nan, one_minus_R=math.nan, found=False,
            ))
            continue
        R = event.t1 * math.sqrt(pz) / (3.0 * K)
        records.append(SweepRecord(
            theta0=theta0, eps=math.pi - theta0, t1=event.t1, k=k, K=K,
            R=R, one_minus_R=1.0 - R, found=True,
        ))
    return records


def pz_invariance_check(
    pz_list: Sequence[float],
    theta0: float,
    cfg: StepConfig,
) -> Tuple[List[Tuple[float, float]], float]:
    """Rescaling check: t1*sqrt(pz) should not depend on pz (flat case).

    Returns the (pz, t1*sqrt(pz)) pairs and their relative spread
    (max - min)/mean.
    """
    params = ProblemParams(beta=0.0)
    pairs = []
    for pz in pz_list:
        if not (pz > 0.0):
            raise ValueError(f"pz must be positive, got {pz!r}")
        horizon = auto_t_end(theta0, pz, cfg.h)
        event = find_first_conjugate(
            launch_state(theta0, pz), params, cfg, horizon, Method.VERLET
        )
        if event is None:
            raise RuntimeError(
                f"no conjugate point found for pz = {pz} before t = {horizon}"
            )
        pairs.append((float(pz), event.t1 * math.sqrt(pz)))
    values = [v for _, v in pairs]
    spread = 0.0
    if len(values) > 1:
        mean = sum(values) / len(values)
        spread = (max(values) - min(values)) / mean
    return pairs, spread


@dataclass(frozen=True)
class DriftReport:
    """Energy-conservation summary of a trajectory."""

    h: float
    method: str
    max_drift: float   # max_n |H_n - H_0|
    drift_half: float  # same restricted to the first half of the interval


def drift_report(traj: Trajectory) -> DriftReport:
    """Maximum energy deviation from H_0, over the whole run and over its
    first half (their ratio separates bounded oscillation from secular
    growth)."""
    if len(traj) < 1:
        raise ValueError("trajectory is empty")
    dev = np.abs(traj.energies - traj.energies[0])
    half_t = traj.times[-1] / 2.0
    half = dev[traj.times <= half_t]
    return DriftReport(
        h=traj.h,
        method=traj.method,
        max_drift=float(np.max(dev)),
        drift_half=float(np.max(half)),
    )


@dataclass(frozen=True)
class TableCell:
    """One entry of the step-size comparison table."""

    beta: float
    method: str
    h: float
    t1: Optional[float]
    error: Optional[str] = None


def conjugate_time_table(
    theta0: float = DEFAULT_THETA0,
    pz: float = DEFAULT_PZ,
    t_end: float = 9.0,
    fp_tol: float = 1e-14,
) -> List[TableCell]:
    """First conjugate time for both methods, both metrics and four step
    sizes (the 16-cell comparison grid)."""
    cells = []
    for beta in TABLE_BETAS:
        params = ProblemParams(beta=beta)
        for method in (Method.RK2, Method.VERLET):
            for h in TABLE_STEPS:
                cfg = StepConfig(h=h, fp_tol=fp_tol)
                try:
                    event = find_first_conjugate(
                        launch_state(theta0, pz), params, cfg, t_end, method
                    )
                except Exception as exc:  # noqa: BLE001 - cell-level reporting
                    cells.append(TableCell(
                        beta=beta, method=method.value, h=h, t1=None,
                        error=f"{type(exc).__name__}: {exc}",
                    ))
                    continue
                t1 = None if event is None else event.t1
                cells.append(TableCell(beta=beta, method=method.value, h=h, t1=t1))
    return cells
