"""Command-line surface.

Subcommands:
  integrate   run one trajectory and write it as CSV (t,x,y,z,px,py,pz,H)
  conjugate   detect the first conjugate time and print it
  table1      print the step-size comparison table for both methods/metrics
  sweep       run the theta0 sweep and write SweepRecords as CSV

All runs start from the standard initial data: position at the origin,
momentum (cos theta0, sin theta0, pz).
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence, TextIO

# argparse's stock matcher does not recognize scientific notation, so
# "--beta -1e-4" would be rejected as a missing argument; widen it.
_NEGATIVE_NUMBER = re.compile(r"^-(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?$")

from .analysis import (
    REFERENCE_T1_FLAT,
    REFERENCE_T1_PERTURBED,
    TABLE_BETAS,
    TABLE_STEPS,
    conjugate_time_table,
    default_eps_grid,
    sweep_theta,
)
from .hamiltonian import DEFAULT_PZ, DEFAULT_THETA0, ProblemParams, launch_state
from .integrators import StepConfig, integrate
from .variational import find_first_conjugate


@dataclass(frozen=True)
class RunSpec:
    """Validated parameters of a single CLI run."""

    method: str
    beta: float
    h: float
    t_end: float
    theta0: float
    pz: float
    output_path: str = "-"
    fp_tol: float = 1e-14

    def __post_init__(self):
        if not (self.t_end >= 0.0):
            raise ValueError(f"t-end must be nonnegative, got {self.t_end!r}")
        if not (0.0 < self.theta0 < math.pi):
            raise ValueError(f"theta0 must lie in (0, pi), got {self.theta0!r}")
        if not (self.pz > 0.0):
            raise ValueError(f"pz must be positive, got {self.pz!r}")

    def step_config(self) -> StepConfig:
        return StepConfig(h=self.h, fp_tol=self.fp_tol)


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _open_out(path: str):
    """Returns (stream, should_close)."""
    if path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="ascii", newline=""), True


def cmd_integrate(spec: RunSpec) -> int:
    params = ProblemParams(beta=spec.beta)
    traj = integrate(
        launch_state(spec.theta0, spec.pz), params, spec.step_config(),
        spec.t_end, spec.method,
    )
    out, close = _open_out(spec.output_path)
    try:
        out.write("t,x,y,z,px,py,pz,H\n")
        for i in range(len(traj)):
            row = traj.data[i]
            cols = [traj.times[i]] + list(row) + [traj.energies[i]]
            out.write(",".join(_fmt(c) for c in cols) + "\n")
    finally:
        if close:
            out.close()
    return 0


def cmd_conjugate(spec: RunSpec) -> int:
    params = ProblemParams(beta=spec.beta)
    event = find_first_conjugate(
        launch_state(spec.theta0, spec.pz), params, spec.step_config(),
        spec.t_end, spec.method,
    )
    if event is None:
        print("none")
    else:
        print(f"{event.t1:.6f}")
    return 0


def cmd_table1(fp_tol: float) -> int:
    cells = conjugate_time_table(fp_tol=fp_tol)
    by_key = {(c.beta, c.method, c.h): c for c in cells}
    print("first conjugate time t1  (theta0 = pi - 1e-3, pz = 10, t_end = 9)")
    failed = False
    for beta in TABLE_BETAS:
        ref = REFERENCE_T1_FLAT if beta == 0.0 else REFERENCE_T1_PERTURBED
        print()
        print(f"beta = {beta:g}   (reference t1 = {ref:.6f})")
        print(f"{'h':>8} {'rk2':>12} {'verlet':>12}")
        for h in TABLE_STEPS:
            row = [f"{h:>8.0e}"]
            for method in ("rk2", "verlet"):
                cell = by_key[(beta, method, h)]
                if cell.error is not None:
                    row.append(f"{'ERROR':>12}")
                    failed = True
                elif cell.t1 is None:
                    row.append(f"{'none':>12}")
                else:
                    row.append(f"{cell.t1:>12.6f}")
            print(" ".join(row))
    if failed:
        print("one or more cells failed", file=sys.stderr)
        return 1
    return 0


def cmd_sweep(
    pz: float,
    h: float,
    eps_grid: Sequence[float],
    output_path: str,
    fp_tol: float,
    t_end: Optional[float],
) -> int:
    for eps in eps_grid:
        if not (0.0 < eps < math.pi):
            raise ValueError(f"eps must lie in (0, pi), got {eps!r}")
    theta_list = [math.pi - eps for eps in eps_grid]
    cfg = StepConfig(h=h, fp_tol=fp_tol)
    records = sweep_theta(theta_list, pz, cfg, t_end=t_end)
    out, close = _open_out(output_path)
    try:
        out.write("theta0,eps,t1,k,K,R,one_minus_R,status\n")
        for r in records:
            status = "ok" if r.found else "not-found"
            cols = [r.theta0, r.eps, r.t1, r.k, r.K, r.R, r.one_minus_R]
            out.write(",".join(_fmt(c) for c in cols) + f",{status}\n")
    finally:
        if close:
            out.close()
    return 0


def _add_run_flags(p: argparse.ArgumentParser, with_out: bool) -> None:
    p.add_argument("--method", choices=["rk2", "verlet"], default="verlet",
                   help="integration scheme (default: verlet)")
    p.add_argument("--beta", type=float, default=0.0,
                   help="metric perturbation (default: 0)")
    p.add_argument("--h", type=float, required=True, help="step size")
    p.add_argument("--t-end", dest="t_end", type=float, default=9.0,
                   help="integration horizon (default: 9)")
    p.add_argument("--theta0", type=float, default=DEFAULT_THETA0,
                   help="launch angle in radians (default: pi - 1e-3)")
    p.add_argument("--pz", type=float, default=DEFAULT_PZ,
                   help="vertical momentum (default: 10)")
    p.add_argument("--fp-tol", dest="fp_tol", type=float, default=1e-14,
                   help="fixed-point residual tolerance (default: 1e-14)")
    if with_out:
        p.add_argument("--out", default="-",
                       help="output CSV path, '-' for stdout (default: '-')")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="martinet",
        description="Geodesic integration and conjugate-point detection "
                    "for the Martinet Hamiltonian.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_int = sub.add_parser("integrate", help="integrate one trajectory to CSV")
    _add_run_flags(p_int, with_out=True)

    p_conj = sub.add_parser("conjugate", help="print the first conjugate time")
    _add_run_flags(p_conj, with_out=False)

    p_tab = sub.add_parser("table1", help="print the step-size comparison table")
    p_tab.add_argument("--fp-tol", dest="fp_tol", type=float, default=1e-14,
                       help="fixed-point residual tolerance (default: 1e-14)")

    p_sweep = sub.add_parser("sweep", help="theta0 sweep of the ratio R to CSV")
    p_sweep.add_argument("--pz", type=float, default=DEFAULT_PZ,
                         help="vertical momentum (default: 10)")
    p_sweep.add_argument("--h", type=float, default=1e-4,
                         help="step size (default: 1e-4)")
    p_sweep.add_argument("--eps-grid", dest="eps_grid", default=None,
                         help="comma-separated eps = pi - theta0 values "
                              "(default: 13 points log-spaced 1e-1..1e-4)")
    p_sweep.add_argument("--t-end", dest="t_end", type=float, default=None,
                         help="integration horizon (default: chosen per angle)")
    p_sweep.add_argument("--fp-tol", dest="fp_tol", type=float, default=1e-14,
                         help="fixed-point residual tolerance (default: 1e-14)")
    p_sweep.add_argument("--out", default="-",
                         help="output CSV path, '-' for stdout (default: '-')")

    for p in (parser, p_int, p_conj, p_tab, p_sweep):
        p._negative_number_matcher = _NEGATIVE_NUMBER  # noqa: SLF001
    return parser


def _parse_eps_grid(text: Optional[str]) -> List[float]:
    if text is None:
        return [float(e) for e in default_eps_grid()]
    toks = [t.strip() for t in text.split(",") if t.strip()]
    if not toks:
        raise ValueError("empty --eps-grid")
    return [float(t) for t in toks]


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "integrate":
            spec = RunSpec(
                method=args.method, beta=args.beta, h=args.h, t_end=args.t_end,
                theta0=args.theta0, pz=args.pz, output_path=args.out,
                fp_tol=args.fp_tol,
            )
            return cmd_integrate(spec)
        if args.command == "conjugate":
            spec = RunSpec(
                method=args.method, beta=args.beta, h=args.h, t_end=args.t_end,
                theta0=args.theta0, pz=args.pz, fp_tol=args.fp_tol,
            )
            return cmd_conjugate(spec)
        if args.command == "table1":
            return cmd_table1(fp_tol=args.fp_tol)
        if args.command == "sweep":
            eps_grid = _parse_eps_grid(args.eps_grid)
            return cmd_sweep(
                pz=args.pz, h=args.h, eps_grid=eps_grid, output_path=args.out,
                fp_tol=args.fp_tol, t_end=args.t_end,
            )
        raise ValueError(f"unknown command {args.command!r}")
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
