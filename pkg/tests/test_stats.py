import numpy as np
import pytest
from scipy import stats as sst

from arcsine_levy import rng
from arcsine_levy.stats import SampleSizeError, ks_one_sample, ks_two_sample


def test_identical_vectors():
    x = rng.normals(1000, 1)
    r = ks_two_sample(x, x)
    assert r.statistic == 0.0 and r.pvalue == 1.0


def test_uniform_calibration():
    u = rng.uniforms(100_000, 11)
    assert ks_one_sample(u, lambda x: x).pvalue > 0.001


def test_gross_mismatch():
    g = rng.exponentials(10_000, 2)
    assert ks_one_sample(g, sst.norm.cdf).pvalue < 1e-10


def test_statistic_matches_scipy():
    x = rng.normals(2000, 5)
    y = rng.normals(1500, 6) * 1.1
    assert abs(ks_one_sample(x, sst.norm.cdf).statistic - sst.kstest(x, "norm").statistic) < 1e-15
    assert abs(ks_two_sample(x, y).statistic - sst.ks_2samp(x, y).statistic) < 1e-15


def test_size_error():
    with pytest.raises(SampleSizeError):
        ks_one_sample(np.arange(50.0), lambda x: x)
    with pytest.raises(SampleSizeError):
        ks_two_sample(np.arange(500.0), np.arange(99.0))
