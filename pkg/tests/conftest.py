"""Shared test helpers: random-state sampling, a high-order reference
integrator, finite-difference Jacobians and phase-plane diagnostics."""

import math

import numpy as np
import pytest
from numba import njit

import martinet as m
from martinet._kernels import gradient_arrays

SEED = 12345

# canonical launch data used by most experiments
THETA0 = m.DEFAULT_THETA0
PZ = m.DEFAULT_PZ


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


def random_states(rng, n, beta=0.0):
    """States covering the experimental regime: (x, y, px, py) uniform in
    [-1, 1], pz in [1, 20], z = 0.  All satisfy the domain guard for the
    betas under test."""
    out = []
    for _ in range(n):
        x, y, px, py = rng.uniform(-1.0, 1.0, 4)
        pz = rng.uniform(1.0, 20.0)
        assert 1.0 + beta * x > 0.0
        out.append(m.PhaseState(x, y, 0.0, px, py, pz))
    return out


@njit(cache=True)
def _field(y, beta):
    hq, hp = gradient_arrays(y[:3], y[3:], beta)
    out = np.empty(6)
    out[:3] = hp
    out[3:] = -hq
    return out


@njit(cache=True)
def rk4_reference(y0, h, n, beta):
    """Classical fourth-order one-step method; the fine-step reference
    oracle for all trajectory error measurements."""
    y = y0.copy()
    for _ in range(n):
        k1 = _field(y, beta)
        k2 = _field(y + 0.5 * h * k1, beta)
        k3 = _field(y + 0.5 * h * k2, beta)
        k4 = _field(y + h * k3, beta)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


def reference_flow(t, beta=0.0, h=1e-5, state0=None):
    """Reference end state at time t from the canonical launch data."""
    y0 = (state0 or m.launch_state()).as_array()
    n = int(round(t / h))
    assert abs(n * h - t) <= 1e-12 * max(t, 1.0)
    return rk4_reference(y0, h, n, beta)


def step_map(state, params, cfg, method):
    if m.Method(method) is m.Method.RK2:
        return m.rk2_step(state, params, cfg)
    return m.verlet_step(state, params, cfg)


def fd_step_jacobian_p0(state, params, cfg, method, delta=1e-7):
    """Central finite differences of one step over the p0 components."""
    a = state.as_array()
    fd = np.empty((6, 3))
    for j in range(3):
        ap = a.copy()
        am = a.copy()
        ap[3 + j] += delta
        am[3 + j] -= delta
        sp = step_map(m.PhaseState.from_array(ap), params, cfg, method).as_array()
        sm = step_map(m.PhaseState.from_array(am), params, cfg, method).as_array()
        fd[:, j] = (sp - sm) / (2.0 * delta)
    return fd


def py_zero_crossings(traj):
    """y values (linearly interpolated) at the sign changes of py."""
    yv = traj.data[:, 1]
    pv = traj.data[:, 4]
    out = []
    for i in range(len(pv) - 1):
        if pv[i] * pv[i + 1] < 0.0:
            f = pv[i] / (pv[i] - pv[i + 1])
            out.append(float(yv[i] + f * (yv[i + 1] - yv[i])))
    return out


def winding_angle(traj):
    """Total unwrapped angle of the (y, py) projection around the origin."""
    ang = np.unwrap(np.arctan2(traj.data[:, 4], traj.data[:, 1]))
    return abs(float(ang[-1] - ang[0]))


def canonical_J():
    J = np.zeros((6, 6))
    J[:3, 3:] = np.eye(3)
    J[3:, :3] = -np.eye(3)
    return J
