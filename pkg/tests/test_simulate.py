import json
import math

import numpy as np
import pytest

from arcsine_levy import exponent as ex, laws, rng, simulate as S
from arcsine_levy.stats import ks_one_sample, ks_two_sample


def test_brownian_sampler():
    s = S.make_sampler(ex.brownian(-0.25, 1.5))
    assert s.kind == "brownianDrift"
    assert s.drift == -0.25 and s.sigma == 1.5 and s.rate == 0
    assert abs(s.decay_rate - 0.25) < 1e-8


def test_path_config_validation():
    with pytest.raises(ValueError):
        S.PathConfig(dt=0)
    with pytest.raises(ValueError):
        S.PathConfig(stop_epsilon=2)


def test_pure_killing_is_exponential():
    psi = ex.brownian(0.0, 0.0, q=1.0)
    x = S.exp_functional(S.make_sampler(psi), S.PathConfig(dt=1e-2), 2000, seed=3)
    assert ks_one_sample(x, lambda t: 1 - np.exp(-t)).pvalue > 0.01
    # with xi = 0 the integral is the killing time itself, whatever dt
    y = S.exp_functional(S.make_sampler(psi), S.PathConfig(dt=1e-3), 2000, seed=3)
    assert np.allclose(x, y, rtol=1e-12)


def test_not_in_n_rejected():
    with pytest.raises(S.SimulationError):
        S.exp_functional(S.make_sampler(ex.brownian(0.5)), S.PathConfig(), 10, seed=0)


def test_max_steps_error():
    cfg = S.PathConfig(dt=1e-3, max_steps=50)
    with pytest.raises(S.MaxStepsError):
        S.exp_functional(S.make_sampler(ex.brownian(-0.25)), cfg, 200, seed=0)


def test_brownian_against_dufresne():
    cfg = S.PathConfig(dt=1e-3)
    x = S.exp_functional(S.make_sampler(ex.brownian(-0.5)), cfg, 4000, seed=11)
    y = S.dufresne_oracle(-0.5, 1.0, 100_000, seed=12)
    assert ks_two_sample(x, y).pvalue > 0.001


def test_dt_halving_bounded_functional():
    psi = ex.brownian(-0.5)
    n = 4000
    f = []
    for dt in (2e-3, 1e-3):
        x = S.exp_functional(S.make_sampler(psi), S.PathConfig(dt=dt), n, seed=5)
        f.append(x / (1 + x))
    diff = abs(f[0].mean() - f[1].mean())
    se = math.sqrt(f[0].var() / n + f[1].var() / n)
    assert diff < 3 * se


def test_workers_bit_identical():
    s = S.make_sampler(ex.brownian(-0.5))
    cfg = S.PathConfig(dt=2e-3)
    a = S.exp_functional(s, cfg, 300, seed=2, workers=1)
    b = S.exp_functional(s, cfg, 300, seed=2, workers=3)
    assert np.array_equal(a, b)


def test_dufresne_oracle():
    x = S.dufresne_oracle(-0.25, 1.0, 50_000, seed=1)
    ks = ks_one_sample(2 / x, laws.gamma_law(0.5).cdf)
    assert ks.pvalue > 0.01
    with pytest.raises(ValueError):
        S.dufresne_oracle(0.1, 1.0, 10, 0)
    # I_Psi / I_dual-tilt = G_(1-rho)/G_rho for Brownian exponents
    rho = 0.3
    r = S.dufresne_oracle(-rho / 2, 1, 100_000, 3) / S.dufresne_oracle(-(1 - rho) / 2, 1, 100_000, 4)
    assert ks_one_sample(r, laws.pareto_std(rho).cdf).pvalue > 0.01


@pytest.mark.slow
def test_spectrally_positive_increment_mgf():
    psi = ex.spectrally_positive(0.5)
    s = S.make_sampler(psi, epsilon=1e-3)
    assert s.kind == "compoundPoissonApprox" and s.rate_minus == 0
    n, block = 100_000, 2000
    xi = np.empty(n)
    for b in range(n // block):
        gen = rng.stream(4, b)
        counts = gen.poisson(s.rate_plus, block)
        sizes = s.jump_sizes(1.0 - gen.random(int(counts.sum())), 1.0)
        owner = np.repeat(np.arange(block), counts)
        jumps = np.bincount(owner, weights=sizes, minlength=block)
        xi[b * block:(b + 1) * block] = s.drift + s.total_sigma * gen.standard_normal(block) + jumps
    u = 0.3
    e = np.exp(u * xi)
    target = math.exp(float(np.real(psi(u))))
    assert abs(e.mean() - target) < 4 * e.std() / math.sqrt(n)


def test_jump_sizes_follow_tail():
    psi = ex.spectrally_positive(0.6)
    eps = 1e-2
    s = S.make_sampler(psi, epsilon=eps)
    y = s.jump_sizes(rng.uniforms(50_000, 1), 1.0)
    tail = psi.measure.tail_plus
    t0 = float(tail(eps))
    assert np.all(y >= eps * (1 - 1e-9))
    assert ks_one_sample(y, lambda v: 1 - np.asarray(tail(v)) / t0).pvalue > 0.01


@pytest.mark.slow
def test_epsilon_halving_indistinguishable():
    psi = ex.spectrally_positive(0.5)
    cfg = S.PathConfig(dt=1e-3)
    a = S.exp_functional(S.make_sampler(psi, 1e-2), cfg, 10_000, seed=1)
    b = S.exp_functional(S.make_sampler(psi, 5e-3), cfg, 10_000, seed=2)
    assert ks_two_sample(a, b).pvalue > 0.01


def test_skewness_mapping():
    for alpha, rho in [(0.7, 0.5), (1.5, 0.6), (0.5, 0.8)]:
        b = S.skewness_for_rho(alpha, rho)
        back = 0.5 + math.atan(b * math.tan(math.pi * alpha / 2)) / (math.pi * alpha)
        assert abs(back - rho) < 1e-12
    with pytest.raises(ValueError):
        S.skewness_for_rho(1.5, 0.2)


def test_stable_increments_positivity():
    for alpha, rho in [(1.0, 0.5), (0.7, 0.3), (1.5, 0.6)]:
        x = S.stable_increments(alpha, rho, 200_000, rng.stream(1, 0))
        p = (x > 0).mean()
        assert abs(p - rho) < 4 * math.sqrt(rho * (1 - rho) / x.size)


def test_cauchy_increments():
    x = S.stable_increments(1.0, 0.5, 50_000, rng.stream(2, 0))
    assert ks_one_sample(x, lambda t: 0.5 + np.arctan(t) / np.pi).pvalue > 0.01


def test_stable_supremum_positive_and_nested():
    m = S.stable_suprema_nested(1.0, 0.5, 1024, 500, seed=3, levels=3)
    assert set(m) == {1024, 512, 256}
    assert np.all(m[1024] >= m[512]) and np.all(m[512] >= m[256])
    assert (m[1024] > 0).mean() > 0.97
    single = S.stable_supremum(1.0, 0.5, 1024, 500, seed=3)
    assert np.array_equal(single, m[1024])


def test_stable_supremum_workers_identical():
    a = S.stable_supremum(0.7, 0.5, 256, 300, seed=5, workers=1)
    b = S.stable_supremum(0.7, 0.5, 256, 300, seed=5, workers=4)
    assert np.array_equal(a, b)


def test_cache_round_trip(tmp_path):
    cfg = {"exponent": "brownian:a=-0.25", "dt": 1e-3}
    x = rng.normals(1000, 1)
    p = S.write_samples(tmp_path / "s.bin", x, seed=42, config=cfg)
    raw = p.read_bytes()
    assert raw[:8] == b"LEVYSMP1"
    data, head = S.read_samples(p)
    assert np.array_equal(data, x)
    assert head == {"count": 1000, "seed": 42, "configHash": S.config_hash(cfg).hex()}
    side = json.loads((tmp_path / "s.bin.json").read_text())
    assert side["count"] == 1000 and side["configHash"] == head["configHash"]
    (tmp_path / "bad.bin").write_bytes(b"NOTMAGIC" + raw[8:])
    with pytest.raises(S.SimulationError):
        S.read_samples(tmp_path / "bad.bin")


def test_cached_samples_reuse(tmp_path):
    calls = []

    def produce():
        calls.append(1)
        return rng.normals(200, 9)

    cfg = {"k": 1}
    a = S.cached_samples(cfg, 3, produce, directory=tmp_path)
    b = S.cached_samples(cfg, 3, produce, directory=tmp_path)
    assert np.array_equal(a, b) and len(calls) == 1
    S.cached_samples(cfg, 4, produce, directory=tmp_path)
    assert len(calls) == 2
    S.cached_samples(cfg, 3, produce, directory=None)
    assert len(calls) == 3


def test_cache_dir_env(monkeypatch, tmp_path):
    monkeypatch.setenv(S.CACHE_ENV, str(tmp_path))
    assert S.cache_dir() == tmp_path
