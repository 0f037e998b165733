import math

import numpy as np
import pytest
from scipy import integrate, stats as sst

from arcsine_levy import laws, rng
from arcsine_levy.mellin import MellinStripError, mc_mellin
from arcsine_levy.stats import ks_one_sample, ks_two_sample


def test_gamma_law():
    g = laws.gamma_law(2.5)
    assert abs(g.mellin(2.0) - 2.5) < 1e-13
    assert abs(laws.gamma_law(1.0).pdf(0.7) - math.exp(-0.7)) < 1e-15
    x = laws.gamma_law(0.4).sample(1_000_000, 3)
    assert abs(x.mean() - 0.4) < 4 * x.std() / math.sqrt(x.size)


def test_arcsine_law():
    a = laws.arcsine_law(0.5)
    assert abs(a.mellin(2.0) - 0.5) < 1e-14
    xs = np.array([0.1, 0.5, 0.8])
    assert np.allclose(a.pdf(xs), 1 / (np.pi * np.sqrt(xs * (1 - xs))), rtol=1e-13)
    for rho in (0.2, 0.5, 0.8):
        f = laws.arcsine_law(rho).pdf
        val = integrate.quad(f, 0, 0.5)[0] + integrate.quad(f, 0.5, 1)[0]
        assert abs(val - 1) < 1e-7


def test_arcsine_cdf_matches_beta():
    x = np.linspace(0.01, 0.99, 30)
    assert np.allclose(laws.arcsine_law(0.3).cdf(x), sst.beta(0.3, 0.7).cdf(x), atol=1e-13)


def test_pareto_moments():
    p = laws.pareto_law(0.5, 0.5)
    assert abs(p.mellin(1.25) - math.sqrt(2)) < 1e-13
    assert abs(p.mellin(1.0) - 1) < 1e-15
    with pytest.raises(MellinStripError):
        laws.pareto_law(0.8, 1.0).mellin(2.0)


def test_pareto_gamma_ratio():
    p = laws.pareto_law(1.5, 0.7)
    assert ks_one_sample(p.sample(100_000, 1), p.cdf).pvalue > 0.01


def test_arcsine_link():
    for rho in (0.25, 0.5, 0.75):
        x = 1.0 / (1.0 + laws.pareto_std(rho).sample(100_000, 7))
        assert ks_one_sample(x, laws.arcsine_law(rho).cdf).pvalue > 0.01


def test_positive_stable():
    s = laws.positive_stable(0.6)
    assert abs(s.mellin(1.0) - 1) < 1e-15
    x = s.sample(1_000_000, 5) ** -0.6
    ref = math.gamma(2.0) / math.gamma(1.6)
    assert abs(x.mean() - ref) < 4 * x.std() / math.sqrt(x.size)
    # alpha = 1/2 is the Levy law with density (4 pi x^3)^(-1/2) exp(-1/(4x))
    half = laws.positive_stable(0.5).sample(100_000, 2)
    cdf = lambda x: 2 * sst.norm.sf(1 / np.sqrt(2 * x))
    assert ks_one_sample(half, cdf).pvalue > 0.01


def test_length_biased_stable():
    alpha, rho = 0.6, 0.3
    lb = laws.length_biased_stable(alpha, 1 - rho)
    assert abs(lb.mellin(1.0) - 1) < 1e-14
    z = 0.2
    x = lb.sample(100_000, 4)
    est = mc_mellin(x, z + 1)
    ref = math.gamma(z + 1 - rho) / math.gamma(alpha * (z + 1 - rho)) * math.gamma(alpha * (1 - rho)) / math.gamma(1 - rho)
    assert est.sigma_distance(ref) < 4
    with pytest.raises(ValueError):
        laws.length_biased_stable(alpha, 0.0)


def test_frechet():
    f = laws.frechet_law(0.4)
    assert abs(f.mellin(2.0) - math.gamma(0.6)) < 1e-13
    assert abs(f.mellin(1.0) - 1) < 1e-15
    assert ks_one_sample(f.sample(100_000, 1), f.cdf).pvalue > 0.01


def test_cauchy_squared():
    c = laws.cauchy_squared()
    x = np.geomspace(1e-3, 1e3, 40)
    assert np.allclose(c.pdf(x), laws.pareto_std(0.5).pdf(x), rtol=1e-13)
    assert abs(c.cdf(1.0) - 0.5) < 1e-14
    assert ks_two_sample(c.sample(100_000, 1), laws.pareto_std(0.5).sample(100_000, 2)).pvalue > 0.01
    assert c.mellin.strip == (0.5, 1.5)


@pytest.mark.parametrize("law", [laws.gamma_law(1.7), laws.pareto_law(2.0, 0.6), laws.arcsine_law(0.35), laws.frechet_law(0.5)])
def test_pdf_mellin_consistency(law):
    lo, hi = law.mellin.strip
    if not math.isfinite(lo):
        lo = hi - 3
    if not math.isfinite(hi):
        hi = lo + 3
    for w in np.linspace(lo, hi, 7)[1:-1]:
        f = lambda x: x ** (w - 1) * law.pdf(x)
        b = law.support[1]
        val = sum(integrate.quad(f, a, c, limit=200, epsabs=0, epsrel=1e-11)[0]
                  for a, c in ([(0, 0.5), (0.5, 1)] if b == 1 else [(0, 1), (1, np.inf)]))
        assert abs(val - law.mellin(w).real) < 1e-6 * max(1, abs(val))


def test_samplers_reproducible():
    for law in (laws.gamma_law(0.3), laws.pareto_std(0.4), laws.positive_stable(0.7)):
        assert np.array_equal(law.sample(1000, 9), law.sample(1000, 9))
