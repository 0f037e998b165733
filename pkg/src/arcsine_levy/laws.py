"""Closed-form positive laws: samplers, densities, distribution functions and
Mellin transforms.

Samplers take ``(n, seed)`` and draw from counter-based streams, so the
output for a given seed does not depend on how the work is chunked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import special as sps

from . import rng
from .mellin import (
    MellinFunction,
    arcsine_mellin,
    frechet_mellin,
    gamma_mellin,
    length_biased_mellin,
    pareto_mellin,
    stable_mellin,
)
from .special import DomainError, beta_fn, betainc_reg, log_gamma

__all__ = [
    "ClosedFormLaw",
    "ESSCollapseError",
    "gamma_law",
    "arcsine_law",
    "pareto_law",
    "pareto_std",
    "positive_stable",
    "stable_samples",
    "length_biased_stable",
    "frechet_law",
    "cauchy_squared",
    "law_from_spec",
]


class ESSCollapseError(RuntimeError):
    """Importance weights concentrated on too few samples."""


@dataclass(frozen=True, eq=False)
class ClosedFormLaw:
    """A positive law with sampler and optional pdf, cdf and Mellin transform."""

    name: str
    params: dict
    sampler: Callable
    pdf: Optional[Callable] = None
    cdf: Optional[Callable] = None
    mellin: Optional[MellinFunction] = None
    support: tuple = (0.0, math.inf)
    meta: dict = field(default_factory=dict)

    def sample(self, n: int, seed: int) -> np.ndarray:
        return self.sampler(int(n), int(seed))

    def describe(self) -> str:
        p = ",".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.name}:{p}" if p else self.name


def _check(cond, msg):
    if not cond:
        raise DomainError(msg)


def _gamma_samples(a, n, seed):
    return rng.standard_gamma(a, n, seed)


def gamma_law(a: float) -> ClosedFormLaw:
    """``G_a`` with density ``x^(a-1) e^(-x) / Gamma(a)``."""
    _check(a > 0, f"gamma_law needs a > 0, got {a}")
    lg = float(np.real(log_gamma(a)))

    def pdf(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(x > 0, np.exp((a - 1) * np.log(np.where(x > 0, x, 1.0)) - x - lg), 0.0)

    return ClosedFormLaw(
        name="gamma",
        params={"a": a},
        sampler=lambda n, seed: _gamma_samples(a, n, seed),
        pdf=pdf,
        cdf=lambda x: sps.gammainc(a, np.maximum(np.asarray(x, dtype=float), 0.0)),
        mellin=gamma_mellin(a),
    )


def _pareto_samples(a, b, n, seed):
    gb = _gamma_samples(b, n, rng.derive_seed(seed, "numerator"))
    ga = _gamma_samples(a, n, rng.derive_seed(seed, "denominator"))
    return gb / ga


def pareto_law(a: float, b: float) -> ClosedFormLaw:
    """``P_(a,b) = G_b / G_a`` with density ``x^(b-1)(1+x)^(-a-b)/B(a,b)``."""
    _check(a > 0 and b > 0, f"pareto_law needs a, b > 0, got ({a}, {b})")
    lb = math.log(beta_fn(a, b))

    def pdf(x):
        x = np.asarray(x, dtype=float)
        xp = np.where(x > 0, x, 1.0)
        return np.where(x > 0, np.exp((b - 1) * np.log(xp) - (a + b) * np.log1p(xp) - lb), 0.0)

    def cdf(x):
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        with np.errstate(invalid="ignore"):
            u = np.where(np.isinf(x), 1.0, x / (1.0 + x))
        return betainc_reg(b, a, u)

    return ClosedFormLaw(
        name="pareto",
        params={"a": a, "b": b},
        sampler=lambda n, seed: _pareto_samples(a, b, n, seed),
        pdf=pdf,
        cdf=cdf,
        mellin=pareto_mellin(a, b),
    )


def pareto_std(rho: float) -> ClosedFormLaw:
    """``P_rho = P_(rho, 1-rho) = G_(1-rho)/G_rho``."""
    _check(0 < rho < 1, f"pareto_std needs 0 < rho < 1, got {rho}")
    law = pareto_law(rho, 1 - rho)
    return ClosedFormLaw("pareto_std", {"rho": rho}, law.sampler, law.pdf, law.cdf, law.mellin)


def arcsine_law(rho: float) -> ClosedFormLaw:
    """Generalized arc-sine law, Beta(rho, 1-rho).

    Sampled as ``(1 + P_rho)^(-1)``; the distribution function is the
    regularized incomplete beta function.
    """
    _check(0 < rho < 1, f"arcsine_law needs 0 < rho < 1, got {rho}")
    c = math.sin(math.pi * rho) / math.pi

    def pdf(x):
        x = np.asarray(x, dtype=float)
        inside = (x > 0) & (x < 1)
        xi = np.where(inside, x, 0.5)
        return np.where(inside, c * xi ** (rho - 1) * (1 - xi) ** (-rho), 0.0)

    def sampler(n, seed):
        return 1.0 / (1.0 + _pareto_samples(rho, 1 - rho, n, seed))

    return ClosedFormLaw(
        name="arcsine",
        params={"rho": rho},
        sampler=sampler,
        pdf=pdf,
        cdf=lambda x: betainc_reg(rho, 1 - rho, x),
        mellin=arcsine_mellin(rho),
        support=(0.0, 1.0),
    )


def _kanter(alpha, u, e):
    # S = sin(alpha U)/sin(U)^(1/alpha) * (sin((1-alpha)U)/E)^((1-alpha)/alpha), U ~ U(0, pi)
    return (
        np.sin(alpha * u)
        / np.sin(u) ** (1.0 / alpha)
        * (np.sin((1.0 - alpha) * u) / e) ** ((1.0 - alpha) / alpha)
    )


def stable_samples(alpha: float, n: int, seed: int) -> np.ndarray:
    """Positive alpha-stable variables with ``E[e^(-lambda S)] = e^(-lambda^alpha)``."""
    u = math.pi * rng.uniforms(n, rng.derive_seed(seed, "angle"))
    e = rng.exponentials(n, rng.derive_seed(seed, "exp"))
    return _kanter(alpha, u, e)


def positive_stable(alpha: float) -> ClosedFormLaw:
    """Positive alpha-stable ``S(alpha)``, ``0 < alpha < 1``; no closed density in general.

    For ``alpha = 1/2`` the law is Levy's, ``S = 1/(4 G_(1/2))``, and a
    distribution function is attached.
    """
    _check(0 < alpha < 1, f"positive_stable needs 0 < alpha < 1, got {alpha}")
    cdf = pdf = None
    if alpha == 0.5:
        def cdf(x):
            x = np.asarray(x, dtype=float)
            with np.errstate(divide="ignore"):
                return np.where(x > 0, sps.erfc(1.0 / (2.0 * np.sqrt(np.where(x > 0, x, 1.0)))), 0.0)

        def pdf(x):
            x = np.asarray(x, dtype=float)
            xp = np.where(x > 0, x, 1.0)
            return np.where(x > 0, np.exp(-1.0 / (4 * xp)) / (2 * math.sqrt(math.pi) * xp**1.5), 0.0)

    return ClosedFormLaw(
        name="stable",
        params={"alpha": alpha},
        sampler=lambda n, seed: stable_samples(alpha, n, seed),
        pdf=pdf,
        cdf=cdf,
        mellin=stable_mellin(alpha),
    )


def length_biased_stable(alpha: float, gam: float, oversample: int = 20, min_ess: float = 0.01) -> ClosedFormLaw:
    """``S_gamma^(-alpha)(alpha)``: ``S^(-alpha)`` reweighted by ``S^(-alpha gamma)``.

    Sampled by importance resampling: ``oversample * n`` base draws of
    ``S``, multinomial resampling with weights ``S^(-alpha gamma)``.  Raises
    :class:`ESSCollapseError` when the effective sample size drops below
    ``min_ess`` times the base size.  The last effective sample size is
    returned by ``law.meta["sample_with_ess"](n, seed)``.
    """
    _check(0 < alpha < 1, f"length_biased_stable needs 0 < alpha < 1, got {alpha}")
    _check(gam > 0, f"length_biased_stable needs gamma > 0, got {gam}")

    def sample_with_ess(n, seed):
        nb = oversample * n
        s = stable_samples(alpha, nb, rng.derive_seed(seed, "base"))
        y = s ** (-alpha)
        logw = gam * np.log(y)
        w = np.exp(logw - logw.max())
        ess = w.sum() ** 2 / np.dot(w, w)
        if ess < min_ess * nb:
            raise ESSCollapseError(f"effective sample size {ess:.0f} below {min_ess:.0%} of {nb}")
        cw = np.cumsum(w)
        cw /= cw[-1]
        u = rng.uniforms(n, rng.derive_seed(seed, "resample"))
        idx = np.minimum(np.searchsorted(cw, 1.0 - u, side="right"), nb - 1)
        return y[idx], float(ess)

    return ClosedFormLaw(
        name="lbstable",
        params={"alpha": alpha, "gamma": gam},
        sampler=lambda n, seed: sample_with_ess(n, seed)[0],
        mellin=length_biased_mellin(alpha, gam),
        meta={"sample_with_ess": sample_with_ess},
    )


def frechet_law(alpha: float) -> ClosedFormLaw:
    """``E^(-alpha)`` for a standard exponential ``E``; cdf ``exp(-x^(-1/alpha))``."""
    _check(0 < alpha < 1, f"frechet_law needs 0 < alpha < 1, got {alpha}")

    def cdf(x):
        x = np.asarray(x, dtype=float)
        xp = np.where(x > 0, x, 1.0)
        return np.where(x > 0, np.exp(-xp ** (-1.0 / alpha)), 0.0)

    def pdf(x):
        x = np.asarray(x, dtype=float)
        xp = np.where(x > 0, x, 1.0)
        t = xp ** (-1.0 / alpha)
        return np.where(x > 0, t * np.exp(-t) / (alpha * xp), 0.0)

    return ClosedFormLaw(
        name="frechet",
        params={"alpha": alpha},
        sampler=lambda n, seed: rng.exponentials(n, seed) ** (-alpha),
        pdf=pdf,
        cdf=cdf,
        mellin=frechet_mellin(alpha),
    )


def cauchy_squared() -> ClosedFormLaw:
    """Square of a standard Cauchy variable; the same law as ``P_(1/2)``."""

    def sampler(n, seed):
        a = rng.normals(n, rng.derive_seed(seed, "num"))
        b = rng.normals(n, rng.derive_seed(seed, "den"))
        return (a / b) ** 2

    def pdf(x):
        x = np.asarray(x, dtype=float)
        xp = np.where(x > 0, x, 1.0)
        return np.where(x > 0, 1.0 / (math.pi * np.sqrt(xp) * (1.0 + xp)), 0.0)

    def cdf(x):
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        return 2.0 / math.pi * np.arctan(np.sqrt(x))

    m = pareto_mellin(0.5, 0.5)
    return ClosedFormLaw("cauchy2", {}, sampler, pdf, cdf, MellinFunction(m.func, m.strip, m.poles, "cauchy2", {}))


_LAWS = {
    "gamma": (gamma_law, ("a",)),
    "arcsine": (arcsine_law, ("rho",)),
    "pareto": (pareto_std, ("rho",)),
    "pareto2": (pareto_law, ("a", "b")),
    "stable": (positive_stable, ("alpha",)),
    "lbstable": (length_biased_stable, ("alpha", "gamma")),
    "frechet": (frechet_law, ("alpha",)),
    "cauchy2": (cauchy_squared, ()),
}


def law_from_spec(name: str, **params) -> ClosedFormLaw:
    """Construct a law by name, e.g. ``law_from_spec("pareto", rho=0.3)``."""
    if name not in _LAWS:
        raise KeyError(f"unknown law {name!r}; known: {', '.join(sorted(_LAWS))}")
    fn, keys = _LAWS[name]
    missing = [k for k in keys if k not in params]
    extra = [k for k in params if k not in keys]
    if missing or extra:
        raise KeyError(f"law {name}: expected parameters {keys}, got {tuple(params)}")
    return fn(*(float(params[k]) for k in keys))
