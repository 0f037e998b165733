"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Seeds are fixed in advance; tolerances are the published acceptance values.
Reports are memoized so the infrastructure test can inspect the negative
controls of every identity check without recomputing them.
"""

import functools
import math

import numpy as np
import pytest

from arcsine_levy import exponent as ex, laws, mellin as me, simulate as sim, verify as V

pytestmark = pytest.mark.slow


def _announce(capsys, label, ok, detail):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")


def _fmt_p(p):
    return "n/a" if p is None else f"{p:.3g}"


# ---------------------------------------------------------------- memoized reports

PARETO_SHAPES = ((1.5, 0.7), (2.5, 1.5))
LINK_RHOS = (0.25, 0.5, 0.75)
BROWNIAN_RHOS = (0.3, 0.5)
FRECHET_ALPHAS = (0.4, 0.6)


@functools.lru_cache(maxsize=None)
def pareto_gamma_report(a, b):
    return V.check_pareto_gamma(a, b, n=100_000, seed=0)


@functools.lru_cache(maxsize=None)
def arcsine_link_report(rho):
    return V.check_arcsine_link(rho, n=100_000, seed=0)


@functools.lru_cache(maxsize=None)
def brownian_paths_report(rho):
    return V.check_main_theorem(ex.brownian(-rho / 2, 1.0), method="paths", n=10_000, seed=0, path_config=sim.PathConfig(dt=1e-3))


@functools.lru_cache(maxsize=None)
def self_reciprocal_report():
    return V.check_self_reciprocal(method="direct", n=1_000_000, seed=0)


@functools.lru_cache(maxsize=None)
def doney_report():
    return V.check_doney(1.0, 0.5, n_steps=1 << 15, n=20_000, seed=7)


@functools.lru_cache(maxsize=None)
def frechet_report(alpha):
    return V.check_frechet(alpha, n=10_000, seed=0, path_config=sim.PathConfig(dt=1e-3), epsilon=1e-3)


@functools.lru_cache(maxsize=None)
def cor_s2_report():
    return V.check_cor_s2(0.6, 0.3, n=100_000, seed=0)


@functools.lru_cache(maxsize=None)
def mellin_product_report(alpha, rho):
    return V.check_mellin_product(alpha, rho)


MELLIN_PRODUCT_PARAMS = ((0.6, 0.3), (0.4, 0.5), (0.8, 0.7))


# ---------------------------------------------------------------- criteria


def test_pareto_gamma_machinery(capsys):
    ok, parts = True, []
    for a, b in PARETO_SHAPES:
        rep = pareto_gamma_report(a, b)
        ks = rep.test("G_b/G_a~P(a,b)")
        worst = max(c.sigma_distance for c in rep.mellin_checks)
        good = ks.p_value > 0.01 and len(rep.mellin_checks) == 5 and worst <= 4.0
        ok &= good
        parts.append(f"(a,b)=({a:g},{b:g}) p={ks.p_value:.3g} max Mellin sigma={worst:.2f}")
    _announce(capsys, "Pareto as a gamma ratio, N=1e5, p>0.01, Mellin within 4 SE at 5 points", ok, "; ".join(parts))
    assert ok


def test_arcsine_link(capsys):
    ok, parts = True, []
    for rho in LINK_RHOS:
        t = arcsine_link_report(rho).test("1/(1+P)~A(rho)")
        ok &= t.p_value > 0.01
        parts.append(f"rho={rho:g} p={t.p_value:.3g}")
    _announce(capsys, "(1+P_rho)^-1 against the arc-sine law, N=1e5, p>0.01", ok, "; ".join(parts))
    assert ok


def test_pareto_mellin_recurrence(capsys):
    worst = 0.0
    for rho in (0.2, 0.35, 0.5, 0.8):
        m = me.pareto_std_mellin(rho)
        re = (rho - 1) + (np.arange(10) + 0.5) / 10.0
        im = np.linspace(-8, 8, 10)
        z = (re[:, None] + 1j * im[None, :]).ravel()
        worst = max(worst, me.verify_recurrence(m, me.RecurrenceSpec.constant(-1.0), z))
    ok = worst <= 1e-12
    _announce(capsys, "Pareto Mellin transform satisfies M(z+1) = -M(z) on 100 points, <= 1e-12", ok, f"max residual {worst:.2e}")
    assert ok


def test_tilt_duality_and_negative_definiteness(capsys):
    ok, parts = True, []
    rng = np.random.default_rng(20240601)
    for alpha, rho in ((0.5, 0.3), (0.8, 0.4), (1.2, 0.5)):
        psi = ex.lamperti_stable(alpha, rho)
        t = ex.tilt(psi, 1.0)
        hat = ex.dual(t)
        ref = ex.lamperti_stable(alpha, 1 - rho)
        lo = max(hat.strip[0], ref.strip[0], -1.0)
        hi = min(hat.strip[1], ref.strip[1], 1.0)
        z = rng.uniform(lo, hi, 50) * 0.9 + 1j * rng.uniform(-10, 10, 50)
        dev = float(np.max(np.abs(hat(z) - ref(z))))
        nd_t = ex.check_negative_definite(t, trials=100, seed=1, tol=1e-8)
        nd_h = ex.check_negative_definite(hat, trials=100, seed=2, tol=1e-8)
        good = dev <= 1e-10 and bool(nd_t) and bool(nd_h)
        ok &= good
        parts.append(f"({alpha:g},{rho:g}) dev={dev:.1e} nd={bool(nd_t) and bool(nd_h)} worst={max(nd_t.worst_ratio, nd_h.worst_ratio):.1e}")
    _announce(capsys, "dual(T_1 Psi_(alpha,rho)) = Psi_(alpha,1-rho) to 1e-10; tilts negative definite", ok, "; ".join(parts))
    assert ok


def test_brownian_end_to_end(capsys):
    ok, parts = True, []
    for rho in BROWNIAN_RHOS:
        rep = brownian_paths_report(rho)
        names = ["I~Dufresne", "Ihat~Dufresne", "Ihat/(Ihat+I)~A(rho)", "I/Ihat~P(rho)"]
        ps = {n: rep.test(n).p_value for n in names}
        good = all(p > 0.001 for p in ps.values())
        ok &= good
        parts.append(f"rho={rho:g} " + " ".join(f"{n}:{p:.3g}" for n, p in ps.items()))
    _announce(capsys, "Brownian paths (dt=1e-3, N=1e4) vs Dufresne, arc-sine and Pareto, p>0.001", ok, "; ".join(parts))
    assert ok


def test_self_reciprocal_cauchy_square(capsys):
    rep = self_reciprocal_report()
    p_c2 = rep.test("R~C^2").p_value
    p_rec = rep.test("R~1/R'").p_value
    ok = p_c2 > 0.01 and p_rec > 0.01
    _announce(capsys, "P_(1/2) against C^2 and 1/P_(1/2), N=1e6, p>0.01", ok, f"C^2 p={p_c2:.3g}; reciprocal p={p_rec:.3g}")
    assert ok


def test_stable_suprema_factorization(capsys):
    rep = doney_report()
    d = rep.test("M^a/(M^a+Mhat^a)~A(rho)@32768").statistic
    d2 = rep.test("M^a/(M^a+Mhat^a)~A(rho)@65536").statistic
    mono = rep.test("monotone-refinement")
    ctrl = rep.test("control:M^a/(M^a+Mhat^a)~A(0.7)")
    ok = d <= 0.02 and mono.passed and ctrl.p_value < 1e-6
    _announce(
        capsys,
        "stable suprema, alpha=1, rho=1/2, 2^15 steps, N=2e4: KS <= 0.02, non-increasing on refinement, rho'=0.7 rejected",
        ok,
        f"D(2^15)={d:.5f} D(2^16)={d2:.5f} change={d2 - d:+.2e} control p={ctrl.p_value:.2g}",
    )
    assert ok


def test_frechet_and_cor_s2_adjudication(capsys):
    ok, parts = True, []
    for alpha in FRECHET_ALPHAS:
        rep = frechet_report(alpha)
        t = rep.test("I/c~Frechet(alpha)")
        ok &= t.p_value > 0.001
        parts.append(f"alpha={alpha:g} p={t.p_value:.3g} c={rep.calibration_constant:.4f}")
    cs = cor_s2_report()
    passing = cs.extra["passingVariants"]
    named = bool(passing) and any(passing[0] in n for n in cs.notes)
    ok &= named
    parts.append(f"cor-s2 passing variants: {', '.join(passing) or 'none'}")
    _announce(capsys, "spectrally positive functional vs Frechet (p>0.001); closed-form factorization adjudicated", ok, "; ".join(parts))
    assert ok


def _strip_grid(lo, hi, n_re=10, n_im=10, width=6.0):
    re = lo + (hi - lo) * (np.arange(n_re) + 0.5) / n_re
    im = np.linspace(-width, width, n_im)
    return (re[:, None] + 1j * im[None, :]).ravel()


REGISTRY_CASES = (
    ("pareto", {"rho": 0.3}),
    ("frechet", {"alpha": 0.6}),
    ("dufresne", {"a": -0.3, "sigma": 1.2}),
    ("lamperti-ef", {"alpha": 0.6, "rho": 0.3}),
    ("lamperti-dual-ef", {"alpha": 0.6, "rho": 0.3}),
    ("bernstein-gamma", {"alpha": 0.6, "rho": 0.3}),
)


def test_mellin_engine(capsys):
    rec = {}
    for name, params in REGISTRY_CASES:
        m, spec = me.closed_form(name, **params)
        lo, hi = m.strip
        lo, hi = max(lo, -0.8), min(hi, 1.8)
        z = _strip_grid(lo + 0.05, hi - 1.05) if hi - lo > 1.2 else _strip_grid(lo, hi - 1 if hi - 1 > lo else hi)
        rec[name] = me.verify_recurrence(m, spec, z)
    # the same closed forms against the exponents that generate them
    rec["lamperti-ef/exponent"] = me.verify_recurrence(me.lamperti_ef_mellin(0.6, 0.3), ex.tilted_stable(0.6, 0.3), _strip_grid(0.05, 0.25))
    rec["frechet/exponent"] = me.verify_recurrence(me.frechet_mellin(0.6), ex.spectrally_positive(0.6), _strip_grid(0.1, 0.9))
    w_res = max(me.bernstein_residual(me.phi_rho(a, r), me.bernstein_w_mellin(a, r)) for a, r in MELLIN_PRODUCT_PARAMS)
    inv = 0.0
    xs = np.linspace(0.05, 0.95, 19)
    for r in (0.25, 0.3, 0.5, 0.75):
        law, m = laws.arcsine_law(r), me.arcsine_mellin(r)
        inv = max(inv, max(abs(me.invert_to_density(m, None, x) - float(law.pdf(x))) for x in xs))
    prod = max(mellin_product_report(a, r).test("calibrated-deviation").statistic for a, r in MELLIN_PRODUCT_PARAMS)
    worst = max(rec, key=rec.get)
    ok = rec[worst] <= 1e-10 and w_res <= 1e-11 and inv <= 1e-6 and prod <= 1e-9
    detail = (
        f"recurrences max {rec[worst]:.1e} ({worst}); W recurrence {w_res:.1e}; "
        f"arc-sine inversion sup error {inv:.1e}; Mellin product deviation {prod:.1e}"
    )
    _announce(capsys, "Mellin engine: recurrences <= 1e-10, W <= 1e-11, inversion <= 1e-6, product <= 1e-9", ok, detail)
    assert ok


def test_infrastructure_determinism_and_controls(capsys):
    # byte-identical reports across worker counts
    runs = {
        "main-theorem": lambda w: V.check_main_theorem(ex.brownian(-0.15), "paths", n=2000, seed=5, path_config=sim.PathConfig(dt=2e-3), workers=w),
        "doney": lambda w: V.check_doney(0.7, 0.5, n_steps=1 << 10, n=4000, seed=5, workers=w),
        "frechet": lambda w: V.check_frechet(0.6, n=400, seed=5, epsilon=1e-2, workers=w),
    }
    identical = {}
    for name, f in runs.items():
        texts = {w: V.to_json(f(w)) for w in (1, 4, 8)}
        identical[name] = len(set(texts.values())) == 1
    # every negative control of every identity check rejects
    reports = (
        [pareto_gamma_report(a, b) for a, b in PARETO_SHAPES]
        + [arcsine_link_report(r) for r in LINK_RHOS]
        + [brownian_paths_report(r) for r in BROWNIAN_RHOS]
        + [self_reciprocal_report(), doney_report(), cor_s2_report()]
        + [frechet_report(a) for a in FRECHET_ALPHAS]
        + [mellin_product_report(a, r) for a, r in MELLIN_PRODUCT_PARAMS]
        + [V.check_main_theorem(ex.brownian(-0.25), "oracle", n=10_000, seed=0)]
    )
    missing = [r.identity for r in reports if not r.controls]
    unrejected = [f"{r.identity}:{c.name}" for r in reports for c in r.controls if not c.passed]
    ok = all(identical.values()) and not missing and not unrejected
    detail = (
        "identical across 1/4/8 workers: " + ", ".join(f"{k}={v}" for k, v in identical.items())
        + f"; {sum(len(r.controls) for r in reports)} controls in {len(reports)} reports"
        + (f"; without controls: {missing}" if missing else "")
        + (f"; not rejected: {unrejected}" if unrejected else "; all rejected")
    )
    _announce(capsys, "reproducible reports and rejecting negative controls", ok, detail)
    assert ok
