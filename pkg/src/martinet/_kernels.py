"""Compiled numerical core.

Every arithmetic formula of the model lives here exactly once; the public
modules wrap these kernels with validation, packaging and error handling.
All kernels assume plain float64 inputs, use (q, p) ordering with
q = (x, y, z) and p = (px, py, pz), and report failures through integer
status codes instead of exceptions so they stay nopython-compatible.
"""

import numpy as np
from numba import njit

# status codes shared by all stepping kernels
OK = 0
DOMAIN = 1        # metric factor 1 + beta*x became <= 0 at an evaluation point
FP_FAIL = 2       # fixed-point iteration did not reach tolerance

METHOD_RK2 = 0
METHOD_VERLET = 1


@njit(cache=True)
def hamiltonian_value(q, p, beta):
    s = 1.0 + beta * q[0]
    u = p[0] + 0.5 * p[2] * q[1] * q[1]
    w = p[1] / s
    return 0.5 * (u * u + w * w)


@njit(cache=True)
def gradient_arrays(q, p, beta):
    """First partials of H. Returns (hq, hp)."""
    s = 1.0 + beta * q[0]
    u = p[0] + 0.5 * p[2] * q[1] * q[1]
    hq = np.empty(3)
    hp = np.empty(3)
    hq[0] = -beta * p[1] * p[1] / (s * s * s)
    hq[1] = u * p[2] * q[1]
    hq[2] = 0.0
    hp[0] = u
    hp[1] = p[1] / (s * s)
    hp[2] = 0.5 * u * q[1] * q[1]
    return hq, hp


@njit(cache=True)
def hessian_arrays(q, p, beta):
    """Second partials of H as blocks (hqq, hqp, hpp).

    hqp[i, j] = d2H / dq_i dp_j; hpq is its transpose.  All z rows and
    columns vanish because H does not depend on z.
    """
    s = 1.0 + beta * q[0]
    y = q[1]
    u = p[0] + 0.5 * p[2] * y * y
    s2 = s * s
    A = np.zeros((3, 3))
    B = np.zeros((3, 3))
    C = np.zeros((3, 3))
    A[0, 0] = 3.0 * beta * beta * p[1] * p[1] / (s2 * s2)
    A[1, 1] = p[2] * p[2] * y * y + u * p[2]
    B[0, 1] = -2.0 * beta * p[1] / (s2 * s)
    B[1, 0] = p[2] * y
    B[1, 2] = y * (u + 0.5 * p[2] * y * y)
    C[0, 0] = 1.0
    C[0, 2] = 0.5 * y * y
    C[1, 1] = 1.0 / s2
    C[2, 0] = C[0, 2]
    C[2, 2] = 0.25 * y * y * y * y
    return A, B, C


@njit(cache=True)
def vf_jacobian(y, beta):
    """Jacobian of the phase-space vector field (hp, -hq) at y = (q, p)."""
    A, B, C = hessian_arrays(y[:3], y[3:], beta)
    M = np.empty((6, 6))
    M[:3, :3] = B.T
    M[:3, 3:] = C
    M[3:, :3] = -A
    M[3:, 3:] = -B
    return M


@njit(cache=True)
def det3(m):
    return (m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
            - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
            + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0]))


@njit(cache=True)
def rk2_step_kernel(y, h, beta):
    """One explicit midpoint step. Returns (y1, status)."""
    if 1.0 + beta * y[0] <= 0.0:
        return y.copy(), DOMAIN
    hq, hp = gradient_arrays(y[:3], y[3:], beta)
    ym = np.empty(6)
    ym[:3] = y[:3] + 0.5 * h * hp
    ym[3:] = y[3:] - 0.5 * h * hq
    if 1.0 + beta * ym[0] <= 0.0:
        return y.copy(), DOMAIN
    hqm, hpm = gradient_arrays(ym[:3], ym[3:], beta)
    y1 = np.empty(6)
    y1[:3] = y[:3] + h * hpm
    y1[3:] = y[3:] - h * hqm
    return y1, OK


@njit(cache=True)
def rk2_step_tangent_kernel(y, T, h, beta):
    """Midpoint step with the exact Jacobian applied to the tangent slab T."""
    if 1.0 + beta * y[0] <= 0.0:
        return y.copy(), T.copy(), DOMAIN
    hq, hp = gradient_arrays(y[:3], y[3:], beta)
    ym = np.empty(6)
    ym[:3] = y[:3] + 0.5 * h * hp
    ym[3:] = y[3:] - 0.5 * h * hq
    if 1.0 + beta * ym[0] <= 0.0:
        return y.copy(), T.copy(), DOMAIN
    hqm, hpm = gradient_arrays(ym[:3], ym[3:], beta)
    y1 = np.empty(6)
    y1[:3] = y[:3] + h * hpm
    y1[3:] = y[3:] - h * hqm
    M0 = vf_jacobian(y, beta)
    Mm = vf_jacobian(ym, beta)
    Ts = T + 0.5 * h * (M0 @ T)
    T1 = T + h * (Mm @ Ts)
    return y1, T1, OK


@njit(cache=True)
def verlet_flat_step_kernel(y, h):
    """One Stormer-Verlet step for beta = 0.

    px and pz are first integrals, so the scheme is explicit once the
    components are computed in the order py-half, y, x, z, py.
    """
    x, yy, z, px, py, pz = y[0], y[1], y[2], y[3], y[4], y[5]
    u0 = px + 0.5 * pz * yy * yy
    pyh = py - 0.5 * h * u0 * pz * yy
    y1 = yy + h * pyh
    u1 = px + 0.5 * pz * y1 * y1
    x1 = x + 0.5 * h * (u0 + u1)
    z1 = z + 0.5 * h * (0.5 * u0 * yy * yy + 0.5 * u1 * y1 * y1)
    py1 = pyh - 0.5 * h * u1 * pz * y1
    out = np.empty(6)
    out[0] = x1
    out[1] = y1
    out[2] = z1
    out[3] = px
    out[4] = py1
    out[5] = pz
    return out


@njit(cache=True)
def _verlet_fp_state(y, h, beta, tol, maxit):
    """Implicit Verlet substeps solved by fixed-point iteration.

    Returns (ph, q1, p1, status).  The half momentum starts from the
    current momentum and the position update starts from an Euler
    predictor; the residual is the max-norm change of the iterate.
    """
    q = y[:3]
    p = y[3:]
    zero = np.zeros(3)
    if 1.0 + beta * q[0] <= 0.0:
        return zero, zero, zero, DOMAIN
    ph = p.copy()
    done = False
    for _ in range(maxit):
        hq, _ = gradient_arrays(q, ph, beta)
        ph_new = p - 0.5 * h * hq
        r = np.max(np.abs(ph_new - ph))
        ph = ph_new
        if r <= tol:
            done = True
            break
    if not done:
        return zero, zero, zero, FP_FAIL
    _, hp0 = gradient_arrays(q, ph, beta)
    q1 = q + h * hp0
    done = False
    for _ in range(maxit):
        if 1.0 + beta * q1[0] <= 0.0:
            return zero, zero, zero, DOMAIN
        _, hp1 = gradient_arrays(q1, ph, beta)
        q1_new = q + 0.5 * h * (hp0 + hp1)
        r = np.max(np.abs(q1_new - q1))
        q1 = q1_new
        if r <= tol:
            done = True
            break
    if not done:
        return zero, zero, zero, FP_FAIL
    if 1.0 + beta * q1[0] <= 0.0:
        return zero, zero, zero, DOMAIN
    hq1, _ = gradient_arrays(q1, ph, beta)
    p1 = ph - 0.5 * h * hq1
    return ph, q1, p1, OK


@njit(cache=True)
def verlet_step_kernel(y, h, beta, tol, maxit):
    """One Stormer-Verlet step, explicit for beta = 0. Returns (y1, status)."""
    if beta == 0.0:
        return verlet_flat_step_kernel(y, h), OK
    ph, q1, p1, status = _verlet_fp_state(y, h, beta, tol, maxit)
    if status != OK:
        return y.copy(), status
    out = np.empty(6)
    out[:3] = q1
    out[3:] = p1
    return out, OK


@njit(cache=True)
def _verlet_tangent_update(qn, q1, ph, T, h, beta):
    """Exact differential of the Verlet step applied to the tangent slab.

    Differentiating the converged substep relations gives three linear
    systems in the tangent blocks; the Hessian is evaluated at the same
    substage points (qn, ph) and (q1, ph) the step itself used.
    """
    A0, B0, C0 = hessian_arrays(qn, ph, beta)
    A1, B1, C1 = hessian_arrays(q1, ph, beta)
    Q = T[:3].copy()
    P = T[3:].copy()
    I3 = np.eye(3)
    B0T = B0.T.copy()
    B1T = B1.T.copy()
    Ph = np.linalg.solve(I3 + 0.5 * h * B0, P - 0.5 * h * (A0 @ Q))
    rhs = (I3 + 0.5 * h * B0T) @ Q + 0.5 * h * ((C0 + C1) @ Ph)
    Q1 = np.linalg.solve(I3 - 0.5 * h * B1T, rhs)
    P1 = (I3 - 0.5 * h * B1) @ Ph - 0.5 * h * (A1 @ Q1)
    out = np.empty_like(T)
    out[:3] = Q1
    out[3:] = P1
    return out


@njit(cache=True)
def verlet_step_tangent_kernel(y, T, h, beta, tol, maxit):
    """Verlet step advancing state and tangent together."""
    if beta == 0.0:
        qn = y[:3].copy()
        y1 = verlet_flat_step_kernel(y, h)
        u0 = y[3] + 0.5 * y[5] * y[1] * y[1]
        ph = np.empty(3)
        ph[0] = y[3]
        ph[1] = y[4] - 0.5 * h * u0 * y[5] * y[1]
        ph[2] = y[5]
        T1 = _verlet_tangent_update(qn, y1[:3], ph, T, h, 0.0)
        return y1, T1, OK
    ph, q1, p1, status = _verlet_fp_state(y, h, beta, tol, maxit)
    if status != OK:
        return y.copy(), T.copy(), status
    y1 = np.empty(6)
    y1[:3] = q1
    y1[3:] = p1
    T1 = _verlet_tangent_update(y[:3].copy(), q1, ph, T, h, beta)
    return y1, T1, OK


@njit(cache=True)
def integrate_loop(y0, h, n, beta, method_id, tol, maxit):
    """Fixed-step integration recording states and energies.

    Returns (data, energies, status, fail_step) where data has shape
    (n + 1, 6) and fail_step is the 1-based index of the failing step
    (0 when status == OK).
    """
    data = np.empty((n + 1, 6))
    energies = np.empty(n + 1)
    data[0] = y0
    energies[0] = hamiltonian_value(y0[:3], y0[3:], beta)
    y = y0.copy()
    for i in range(n):
        if method_id == METHOD_RK2:
            y, status = rk2_step_kernel(y, h, beta)
        else:
            y, status = verlet_step_kernel(y, h, beta, tol, maxit)
        if status != OK:
            return data, energies, status, i + 1
        data[i + 1] = y
        energies[i + 1] = hamiltonian_value(y[:3], y[3:], beta)
    return data, energies, OK, 0


@njit(cache=True)
def det_series_loop(y0, T0, h, n, beta, method_id, tol, maxit):
    """Joint state/tangent integration recording det of the top 3x3 block.

    Returns (dets, y_final, T_final, status, fail_step).
    """
    dets = np.empty(n + 1)
    dets[0] = det3(T0[:3])
    y = y0.copy()
    T = T0.copy()
    for i in range(n):
        if method_id == METHOD_RK2:
            y, T, status = rk2_step_tangent_kernel(y, T, h, beta)
        else:
            y, T, status = verlet_step_tangent_kernel(y, T, h, beta, tol, maxit)
        if status != OK:
            return dets, y, T, status, i + 1
        dets[i + 1] = det3(T[:3])
    return dets, y, T, OK, 0
