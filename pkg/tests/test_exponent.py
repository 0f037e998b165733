import math

import numpy as np
import pytest

from arcsine_levy import exponent as ex
from arcsine_levy.special import gamma


def _grid(n=50, lo=-0.2, hi=0.2, seed=0):
    rng = np.random.default_rng(seed)
    return rng.uniform(lo, hi, n) + 1j * rng.uniform(-5, 5, n)


def _exp_measure():
    m = ex.LevyMeasure(
        density=lambda y: np.where(np.asarray(y) > 0, np.exp(-np.abs(y)), 0.0),
        tail_plus=lambda y: np.exp(-np.asarray(y, dtype=float)),
        tail_minus=lambda y: np.zeros(np.shape(y)),
        exp_barrier=1.0,
    )
    return ex.CharExponent(name="expjumps", measure=m, strip=(-math.inf, 1.0))


def test_brownian_values():
    psi = ex.brownian(-0.25, 1.0)
    assert abs(psi(0.5)) < 1e-15
    z = _grid()
    assert np.allclose(psi(z), -0.25 * z + z**2 / 2, atol=1e-14)


def test_quadrature_matches_symbolic():
    psi = _exp_measure()
    z = 0.3
    ref = 1 / (1 - z) - 1 - z * (1 - 2 / math.e)
    assert abs(ex.evaluate(psi, z) - ref) < 1e-8
    assert abs(ex.evaluate(psi, 0.2 + 1.5j) - (1 / (0.8 - 1.5j) - 1 - (0.2 + 1.5j) * (1 - 2 / math.e))) < 1e-8


def test_closed_form_matches_quadrature():
    psi = ex.spectrally_positive(0.6)
    bare = ex.CharExponent(name="q", drift=psi.drift, measure=psi.measure, strip=psi.strip)
    for z in (0.1 + 0.5j, -0.4 + 2j, 0.3 + 0j):
        assert abs(ex.evaluate(psi, z) - ex.quadrature_eval(bare, z)) < 1e-8


def test_lamperti_root_and_killing():
    for alpha, rho in [(0.5, 0.3), (0.8, 0.4), (1.2, 0.5)]:
        psi = ex.lamperti_stable(alpha, rho)
        assert abs(psi(rho)) < 1e-13
        q = gamma(alpha) / (gamma(1 - alpha * rho) * gamma(alpha * rho))
        assert abs(-psi(0.0) - q) < 1e-12 and q > 0
        assert abs(ex.find_rho(psi).rho - rho) < 1e-12


def test_tilted_stable():
    psi = ex.tilted_stable(0.6, 0.3)
    assert abs(psi(0.3)) < 1e-13
    assert abs(psi(0.0)) < 1e-15
    assert ex.derivative_at_zero(psi) < 0


def test_find_rho_examples():
    assert abs(ex.find_rho(ex.brownian(-0.25)).rho - 0.5) < 1e-12
    killed = ex.from_closed_form("killed", lambda z: -1 - np.asarray(z))
    assert ex.find_rho(killed).rho == math.inf


def test_non_convex_rejected():
    bad = ex.from_closed_form("concave", lambda z: np.asarray(z) - np.asarray(z) ** 2)
    with pytest.raises(ex.NonConvexError):
        ex.find_rho(bad)


def test_classify_examples():
    f = ex.classify(ex.brownian(-0.25), 1.0)
    assert f.in_n and f.in_n_beta and f.in_n_beta_rho
    assert not ex.classify(ex.brownian(1.0), 1.0).in_n
    alpha = 0.6
    sp = ex.spectrally_positive(alpha)
    assert abs(ex.find_rho(sp).rho - 1 / alpha) < 1e-10
    # beta = rho + 1/alpha with the target positivity parameter rho in (0, 1]
    g = ex.classify(sp, 0.3 + 1 / alpha)
    assert g.tail_direction in ("non-increasing", "constant")
    assert g.in_n_beta_rho


def test_tail_monotonicity_direction():
    m = _exp_measure().measure
    assert ex.tail_monotonicity(m, 0.5)[0] == "non-increasing"
    assert ex.tail_monotonicity(m, 2.0)[0] == "non-decreasing"


def test_tilt_brownian_closed_form():
    a = -0.25
    t = ex.tilt(ex.brownian(a), 1.0)
    z = _grid()
    assert np.allclose(t(z), z**2 / 2 + (a + 0.5) * z, atol=1e-12)


def test_tilt_removable_singularity():
    t = ex.tilt(ex.lamperti_stable(0.8, 0.4), 1.0)
    assert np.isfinite(t(0.0)) and np.isfinite(t(1e-12))
    assert abs(t(1e-12) - t(0.0)) < 1e-9


@pytest.mark.parametrize("alpha,rho", [(0.5, 0.3), (0.8, 0.4), (1.2, 0.5)])
def test_dual_tilt_is_lamperti(alpha, rho):
    hat = ex.dual(ex.tilt(ex.lamperti_stable(alpha, rho), 1.0))
    ref = ex.lamperti_stable(alpha, 1 - rho)
    z = _grid(seed=1)
    assert np.max(np.abs(hat(z) - ref(z))) < 1e-10
    q1 = gamma(alpha) / (gamma(alpha * (1 - rho)) * gamma(1 - alpha * (1 - rho)))
    assert abs(hat.killing - q1) < 1e-9


def test_tilt_group_law():
    psi = ex.brownian(-0.7, 1.3)
    z = _grid()
    two = ex.tilt(ex.tilt(psi, 0.4), 0.6)
    one = ex.tilt(psi, 1.0)
    assert np.max(np.abs(two(z) - one(z))) < 1e-10


def test_tilt_inadmissible():
    with pytest.raises(ex.InadmissibleTiltError):
        ex.tilt(ex.spectrally_positive(0.6), 50.0)
    with pytest.raises(ex.InadmissibleTiltError):
        ex.tilt(ex.brownian(-0.25), -1.0)


def test_tilt_outputs_negative_definite():
    sp = ex.spectrally_positive(0.5)
    t = ex.tilt(sp, 0.3 + 2.0)
    assert t(0.0).real <= 0
    assert ex.check_negative_definite(t, seed=3)
    # the tilt is the dual of the tilted stable exponent
    z = _grid()
    assert np.max(np.abs(t(z) - ex.dual(ex.tilted_stable(0.5, 0.3))(z))) < 1e-9


def test_dual_involution_and_brownian():
    psi = ex.lamperti_stable(0.7, 0.35)
    z = _grid()
    assert np.max(np.abs(ex.dual(ex.dual(psi))(z) - psi(z))) < 1e-12
    d = ex.dual(ex.brownian(0.3))
    assert np.allclose(d(z), ex.brownian(-0.3)(z), atol=1e-14)


def test_theorem_pair():
    rho = 0.3
    psi, hat, r = ex.theorem_pair(ex.brownian(-rho / 2))
    assert abs(r - rho) < 1e-12
    z = _grid()
    assert np.allclose(hat(z), z**2 / 2 + (rho - 1) / 2 * z, atol=1e-12)
    assert abs(hat(1 - rho)) < 1e-9
    assert ex.classify(hat, 1.0).in_n
    with pytest.raises(ex.ExponentError):
        ex.theorem_pair(ex.brownian(-0.6))  # rho = 1.2


def test_negative_definite_examples():
    psi = ex.brownian(-0.25)
    assert ex.check_negative_definite(psi, seed=1)
    bad = ex.from_closed_form("corrupt", lambda z: psi(z) + np.abs(np.asarray(z)) ** 2)
    res = ex.check_negative_definite(bad, seed=1)
    assert not res and res.witness is not None


def test_convexity_on_zero_beta():
    for psi in (ex.lamperti_stable(0.8, 0.4), ex.spectrally_positive(0.4), ex.tilted_stable(0.6, 0.3)):
        u = np.linspace(0.01, 0.95, 200)
        v = np.real(psi(u))
        assert np.min(v[2:] - 2 * v[1:-1] + v[:-2]) >= -1e-8
