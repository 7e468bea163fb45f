import math
import warnings

import numpy as np
import pytest
from scipy.integrate import quad

import martinet as m
from conftest import THETA0


FLAT = m.ProblemParams(0.0)


def quad_K(k):
    with warnings.catch_warnings():
        # near k = 1 the adaptive rule reports roundoff difficulty while
        # still returning ~12 correct digits
        warnings.simplefilter("ignore")
        val, _ = quad(
            lambda u: 1.0 / math.sqrt(1.0 - k * k * math.sin(u) ** 2),
            0.0, math.pi / 2.0, epsabs=1e-14, epsrel=1e-14, limit=200,
        )
    return val


def test_elliptic_K_domain():
    for bad in (-0.1, 1.0, 1.5):
        with pytest.raises(ValueError):
            m.elliptic_K(bad)


def test_elliptic_K_known_values():
    assert m.elliptic_K(0.0) == math.pi / 2.0
    assert m.elliptic_K(1.0 / math.sqrt(2.0)) == pytest.approx(
        1.8540746773013719, rel=1e-12
    )
    # logarithmic blow-up regime of the experiments
    assert m.elliptic_K(math.sin(0.5 * THETA0)) == pytest.approx(
        8.9871973618, abs=5e-9
    )


def test_elliptic_K_matches_quadrature():
    moduli = (0.1, 0.5, 0.9, 0.99, math.sin(0.5 * THETA0))
    for k in moduli:
        q = quad_K(k)
        assert abs(m.elliptic_K(k) - q) / q <= 1e-10


def test_elliptic_K_strictly_increasing():
    ks = np.linspace(0.0, 0.999999, 200)
    vals = [m.elliptic_K(float(k)) for k in ks]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_ratio_R_identities():
    # k is reconstructed inside ratio_R as sin(theta0/2), so keep moduli
    # away from 1 where K amplifies the asin/sin round trip
    for k, pz in ((0.3, 4.0), (0.9, 10.0), (0.99, 17.0)):
        theta0 = 2.0 * math.asin(k)
        K = m.elliptic_K(k)
        assert m.ratio_R(3.0 * K / math.sqrt(pz), pz, theta0) == pytest.approx(
            1.0, rel=1e-12
        )
        assert m.ratio_R(2.0 * K / math.sqrt(pz), pz, theta0) == pytest.approx(
            2.0 / 3.0, rel=1e-12
        )


def test_ratio_R_reference_combination():
    R = m.ratio_R(8.416409, 10.0, THETA0)
    assert 2.0 / 3.0 <= R <= 1.0
    assert R == pytest.approx(0.9871457915, abs=1e-9)


def test_ratio_R_homogeneity(rng):
    for _ in range(20):
        t1 = rng.uniform(0.5, 12.0)
        pz = rng.uniform(1.0, 30.0)
        theta0 = rng.uniform(0.1, math.pi - 1e-5)
        c = rng.uniform(0.2, 5.0)
        a = m.ratio_R(c * t1, pz / c**2, theta0)
        b = m.ratio_R(t1, pz, theta0)
        assert a == pytest.approx(b, rel=1e-12)


def test_ratio_R_domain():
    with pytest.raises(ValueError):
        m.ratio_R(0.0, 10.0, THETA0)
    with pytest.raises(ValueError):
        m.ratio_R(1.0, 0.0, THETA0)
    with pytest.raises(ValueError):
        m.ratio_R(1.0, 10.0, math.pi)


def test_default_eps_grid():
    grid = m.default_eps_grid()
    assert len(grid) == 13
    assert grid[0] == pytest.approx(1e-1) and grid[-1] == pytest.approx(1e-4)
    ratios = grid[1:] / grid[:-1]
    np.testing.assert_allclose(ratios, ratios[0], rtol=1e-12)


def test_auto_t_end_on_grid_and_sufficient():
    h = 1e-4
    horizon = m.auto_t_end(THETA0, 10.0, h)
    assert horizon > 8.42  # beyond the known conjugate time
    n = round(horizon / h)
    assert abs(n * h - horizon) <= 1e-12 * horizon


def test_sweep_single_point():
    rec, = m.sweep_theta([math.pi - 1e-3], 10.0, m.StepConfig(h=1e-4))
    assert rec.found
    assert rec.eps == pytest.approx(1e-3, rel=1e-9)
    assert rec.k == pytest.approx(math.sin(0.5 * THETA0), rel=1e-15)
    assert rec.K == pytest.approx(m.elliptic_K(rec.k), rel=1e-15)
    assert rec.t1 == pytest.approx(8.416410, abs=1e-5)
    assert rec.R == pytest.approx(rec.t1 * math.sqrt(10.0) / (3.0 * rec.K), rel=1e-15)
    assert rec.one_minus_R == pytest.approx(1.0 - rec.R, abs=1e-15)
    assert 2.0 / 3.0 - 1e-3 <= rec.R <= 1.0 + 1e-3


def test_sweep_flags_unresolved_records():
    rec, = m.sweep_theta([math.pi - 1e-3], 10.0, m.StepConfig(h=1e-2), t_end=1.0)
    assert not rec.found
    assert math.isnan(rec.t1) and math.isnan(rec.R) and math.isnan(rec.one_minus_R)
    assert rec.K > 0.0


def test_sweep_validates_theta():
    with pytest.raises(ValueError):
        m.sweep_theta([math.pi], 10.0, m.StepConfig(h=1e-2))
    with pytest.raises(ValueError):
        m.sweep_theta([0.0], 10.0, m.StepConfig(h=1e-2))


def test_pz_invariance_single_entry():
    pairs, spread = m.pz_invariance_check([10.0], THETA0, m.StepConfig(h=1e-3))
    assert len(pairs) == 1
    assert spread == 0.0
    assert pairs[0][0] == 10.0
    assert pairs[0][1] == pytest.approx(8.416412 * math.sqrt(10.0), abs=1e-3)


def test_drift_report_constant_energy():
    times = np.arange(5) * 0.1
    data = np.zeros((5, 6))
    energies = np.full(5, 0.75)
    tr = m.Trajectory(times=times, data=data, energies=energies, method="verlet")
    rep = m.drift_report(tr)
    assert rep.max_drift == 0.0 and rep.drift_half == 0.0
    assert rep.method == "verlet"


def test_drift_report_invariant_ordering():
    tr = m.integrate(m.launch_state(), FLAT, m.StepConfig(h=0.05), 9.0, "rk2")
    rep = m.drift_report(tr)
    assert rep.max_drift >= rep.drift_half >= 0.0
    assert rep.h == pytest.approx(0.05, rel=1e-15)


def test_conjugate_time_table_structure():
    cells = m.conjugate_time_table()
    assert len(cells) == 16
    assert all(c.error is None for c in cells)
    assert all(c.t1 is not None for c in cells)
    by_key = {(c.beta, c.method, c.h): c.t1 for c in cells}
    # fine-step cells sit on the reference values
    assert by_key[(0.0, "verlet", 1e-4)] == pytest.approx(8.416409, abs=1e-5)
    assert by_key[(-1e-4, "verlet", 1e-4)] == pytest.approx(4.876997, abs=1e-5)
    assert by_key[(-1e-4, "rk2", 1e-4)] == pytest.approx(4.876997, abs=1e-5)
