"""Levy-Khintchine exponents.

An exponent is stored as a quadruplet ``(q, a, sigma, Pi)`` together with an
analytic strip and, when available, a closed-form complex function that
takes precedence over quadrature:

    Psi(z) = a z + sigma^2 z^2 / 2 + int (e^{zy} - 1 - z y 1_{|y|<1}) Pi(dy) - q.

The module provides evaluation, root finding, class membership tests, the
tilt ``T_beta Psi(z) = z/(z+beta) Psi(z+beta)``, duality and a randomized
negative-definiteness test, plus the built-in exponents used elsewhere.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy import integrate, optimize

from .special import gamma, gamma_ratio, rgamma

__all__ = [
    "ExponentError",
    "StripError",
    "QuadratureError",
    "NonConvexError",
    "InadmissibleTiltError",
    "InconclusiveGridError",
    "LevyMeasure",
    "CharExponent",
    "RootInfo",
    "ClassFlags",
    "NDResult",
    "evaluate",
    "quadrature_eval",
    "derivative_at_zero",
    "find_rho",
    "classify",
    "tail_monotonicity",
    "tilt",
    "dual",
    "theorem_pair",
    "check_negative_definite",
    "brownian",
    "lamperti_stable",
    "spectrally_positive",
    "tilted_stable",
    "from_closed_form",
]

REMOVABLE_TOL = 1e-9


class ExponentError(ValueError):
    """Base class for exponent errors."""


class StripError(ExponentError):
    pass


class QuadratureError(ExponentError):
    pass


class NonConvexError(ExponentError):
    pass


class InadmissibleTiltError(ExponentError):
    pass


class InconclusiveGridError(ExponentError):
    pass


def _log_expm1(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(x > 1.0, x + np.log1p(-np.exp(-np.maximum(x, 1.0))), np.log(np.expm1(np.minimum(x, 1.0))))


def _safe_scale(log_factor, base):
    """``exp(log_factor) * base`` with ``0`` wherever ``base`` underflowed."""
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.exp(log_factor) * base
    return np.where(base == 0.0, 0.0, out)


@dataclass(frozen=True, eq=False)
class LevyMeasure:
    """Levy measure given through its density and both tails.

    Parameters
    ----------
    density : callable
        Density on ``R \\ {0}``, vectorized over real ``y``.
    tail_plus, tail_minus : callable
        ``Pi((y, inf))`` and ``Pi((-inf, -y))`` for ``y > 0``.
    exp_barrier : float
        Supremum of ``u`` with ``int_{y>1} e^{uy} Pi(dy) < inf``.
    """

    density: Callable
    tail_plus: Callable
    tail_minus: Callable
    exp_barrier: float = math.inf

    @property
    def has_positive(self) -> bool:
        return float(self.tail_plus(1e-12)) > 0.0

    @property
    def has_negative(self) -> bool:
        return float(self.tail_minus(1e-12)) > 0.0


@dataclass(frozen=True, eq=False)
class CharExponent:
    """A Levy-Khintchine exponent.

    ``strip`` is the open interval of real parts on which ``Psi`` is analytic.
    ``closed_form``, when given, is used for evaluation and is taken to be
    the meromorphic continuation of the quadrature formula.
    """

    name: str
    killing: float = 0.0
    drift: float = 0.0
    gaussian: float = 0.0
    measure: Optional[LevyMeasure] = None
    strip: tuple = (-math.inf, math.inf)
    closed_form: Optional[Callable] = None
    params: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __call__(self, z):
        return evaluate(self, z)

    def eval(self, z):
        return evaluate(self, z)

    def describe(self) -> str:
        if "[" in self.name:  # derived exponents carry the parent's description
            return self.name
        p = ",".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.name}:{p}" if p else self.name


def _integrand_kernel(z, y, sign):
    # e^{z s y} - 1 - z s y 1_{y<1} with s = sign, y > 0
    w = sign * z * y
    small = np.abs(w) < 1e-3
    series = w * w * (0.5 + w * (1.0 / 6.0 + w / 24.0))
    full = np.expm1(w) - np.where(y < 1.0, w, 0.0)
    near = np.where(y < 1.0, series, np.expm1(w))
    return np.where(small, near, full)


def _side_integral(z: complex, dens: Callable, sign: float) -> complex:
    def near(y):
        return complex(_integrand_kernel(z, y, sign) * dens(sign * y))

    def far(y):
        # (e^{w} - 1) d  computed as e^{w + log d} - d to avoid inf * 0
        d = float(dens(sign * y))
        if d <= 0.0:
            return 0.0j
        return complex(np.exp(sign * z * y + math.log(d)) - d)

    total = 0.0 + 0.0j
    for f, lo, hi in ((near, 0.0, 1.0), (far, 1.0, math.inf)):
        with warnings.catch_warnings(), np.errstate(over="ignore", invalid="ignore"):
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, err = integrate.quad(f, lo, hi, complex_func=True, limit=400, epsabs=1e-13, epsrel=1e-12)
        if not (np.isfinite(val.real) and np.isfinite(val.imag)) or abs(err) > 1e-7 * (1.0 + abs(val)):
            raise QuadratureError(f"Levy integral did not converge at z={z} (err {abs(err):.2e})")
        total += val
    return total


def quadrature_eval(psi: CharExponent, z) -> np.ndarray | complex:
    """Evaluate the Levy-Khintchine formula by adaptive quadrature."""
    zs = np.asarray(z, dtype=np.complex128)
    lo, hi = psi.strip
    if np.any(zs.real < lo) or np.any(zs.real > hi):
        raise StripError(f"Re z outside the closed strip [{lo}, {hi}] of {psi.name}")
    m = psi.measure
    out = np.empty(zs.shape, dtype=np.complex128)
    for idx, zz in np.ndenumerate(zs):
        v = psi.drift * zz + 0.5 * psi.gaussian**2 * zz * zz - psi.killing
        if m is not None:
            if m.has_positive:
                v += _side_integral(zz, m.density, 1.0)
            if m.has_negative:
                v += _side_integral(zz, m.density, -1.0)
        out[idx] = v
    return out.item() if zs.ndim == 0 else out


def evaluate(psi: CharExponent, z):
    """Evaluate ``Psi(z)``.

    Closed forms are evaluated wherever they are defined (they continue
    ``Psi`` meromorphically); quadrature requires ``Re z`` in the closed strip.
    """
    if psi.closed_form is not None:
        zs = np.asarray(z, dtype=np.complex128)
        out = np.asarray(psi.closed_form(zs), dtype=np.complex128)
        return out.item() if zs.ndim == 0 else out
    return quadrature_eval(psi, z)


def _real(psi, u):
    return np.real(evaluate(psi, np.asarray(u, dtype=float)))


def derivative_at_zero(psi: CharExponent, h: float = 1e-4) -> float:
    """``Psi'(0+)`` by one-sided differences with Richardson extrapolation."""
    p0 = float(_real(psi, 0.0))
    d1 = (float(_real(psi, h)) - p0) / h
    d2 = (float(_real(psi, h / 10)) - p0) / (h / 10)
    return (10.0 * d2 - d1) / 9.0


@dataclass(frozen=True)
class RootInfo:
    rho: float
    derivative_at_zero_plus: float
    killing_negative: bool

    @property
    def finite(self) -> bool:
        return math.isfinite(self.rho)


def _search_grid(hi: float, n: int = 400) -> np.ndarray:
    if math.isfinite(hi):
        return hi * np.arange(1, n + 1) / (n + 1)
    return np.geomspace(1e-6, 1e4, n)


def _convexity_grid(hi: float, rho: float) -> np.ndarray:
    top = 0.98 * hi if math.isfinite(hi) else 2.0 * max(1.0, rho if math.isfinite(rho) else 1.0)
    return np.linspace(top / 200, top, 200)


def find_rho(psi: CharExponent, check_convex: bool = True) -> RootInfo:
    """Largest zero of ``Psi`` on ``(0, beta)`` or ``+inf`` when none exists."""
    hi = psi.strip[1]
    if hi <= 0:
        raise StripError(f"{psi.name}: strip does not meet (0, inf)")
    u = _search_grid(hi)
    vals = _real(psi, u)
    p0 = float(_real(psi, 0.0))
    d0 = derivative_at_zero(psi)
    rho = math.inf
    finite = np.isfinite(vals)
    pos = np.nonzero(finite & (vals > 0))[0]
    if pos.size:
        k = pos[0]
        left = 0.0 if k == 0 else u[k - 1]
        fl = p0 if k == 0 else vals[k - 1]
        if fl < 0:
            rho = optimize.brentq(lambda x: float(_real(psi, x)), left, u[k], xtol=1e-15, rtol=1e-15, maxiter=500)
        elif fl == 0 and k > 0:
            rho = float(left)
    if check_convex:
        g = _convexity_grid(hi, rho)
        gv = _real(psi, g)
        d2 = gv[2:] - 2 * gv[1:-1] + gv[:-2]
        scale = max(1.0, float(np.max(np.abs(gv))))
        if np.min(d2) < -1e-8 * scale:
            raise NonConvexError(
                f"{psi.name}: second difference {np.min(d2):.3e} on (0, {g[-1]:.3g}); "
                "the exponent is not convex there, check the definition"
            )
    return RootInfo(rho=rho, derivative_at_zero_plus=d0, killing_negative=p0 < 0)


@dataclass(frozen=True)
class ClassFlags:
    """Membership of an exponent in the classes N, N_beta and N_beta(rho)."""

    in_n: bool
    in_n_beta: bool
    in_n_beta_rho: bool
    beta: float
    rho: float
    rho_below_beta: bool
    derivative_at_zero_plus: float
    killing: float
    tail_check: str
    tail_direction: str
    limit_u_psi: float
    notes: tuple = ()

    def as_dict(self) -> dict:
        return {
            "inN": self.in_n,
            "inNbeta": self.in_n_beta,
            "inNbetaRho": self.in_n_beta_rho,
            "beta": self.beta,
            "rho": self.rho,
            "rhoBelowBeta": self.rho_below_beta,
            "derivativeAtZeroPlus": self.derivative_at_zero_plus,
            "killing": self.killing,
            "tailCheck": self.tail_check,
            "tailDirection": self.tail_direction,
            "limitUPsi": self.limit_u_psi,
            "notes": list(self.notes),
        }


TAIL_GRID = np.geomspace(1e-4, 50.0, 200)


def tail_monotonicity(measure: LevyMeasure, beta: float, tol: float = 1e-10, band: float = 1e-6):
    """Direction of ``y -> e^{beta y} Pi_+(y)`` on a log grid.

    Returns ``(direction, worst)`` where direction is ``"non-increasing"``,
    ``"non-decreasing"``, ``"constant"`` or ``"neither"``, and ``worst`` is the
    largest relative increase.  Raises :class:`InconclusiveGridError` when
    the largest relative increase lies between ``tol`` and ``band``.
    """
    y = TAIL_GRID
    with np.errstate(over="ignore"):
        g = _safe_scale(beta * y, np.asarray(measure.tail_plus(y), dtype=float))
    if not np.all(np.isfinite(g)):
        return "neither", math.inf
    ref = np.maximum(np.abs(g[:-1]), 1e-300)
    rel = np.diff(g) / ref
    up, down = float(np.max(rel, initial=0.0)), float(-np.min(rel, initial=0.0))
    if np.all(g == 0):
        return "constant", 0.0
    if up <= tol:
        return "non-increasing", up
    if up <= band:
        raise InconclusiveGridError(
            f"e^(beta y) Pi_+(y) increases by {up:.2e} (relative), inside the noise band ({tol:g}, {band:g}]"
        )
    if down <= tol:
        return "non-decreasing", up
    return "neither", up


def _limit_u_psi(psi, beta):
    us = np.array([-1e-3, -1e-4, -1e-5])
    vals = us * _real(psi, us + beta)
    # extrapolate to u = 0 through the three points (exact for quadratics)
    x = us / 1e-3
    w = np.array([x[1] * x[2] / ((x[0] - x[1]) * (x[0] - x[2])),
                  x[0] * x[2] / ((x[1] - x[0]) * (x[1] - x[2])),
                  x[0] * x[1] / ((x[2] - x[0]) * (x[2] - x[1]))])
    return float(w @ vals)


def classify(psi: CharExponent, beta: float) -> ClassFlags:
    """Decide membership in ``N``, ``N_beta`` and ``N_beta(rho)``.

    When ``psi`` has no Levy measure the tail condition is replaced by a
    negative-definiteness test of the tilted exponent.
    """
    hi = psi.strip[1]
    if beta > hi + 1e-12:
        raise StripError(f"beta={beta} exceeds the strip end {hi} of {psi.name}")
    notes = []
    killing = -float(_real(psi, 0.0))
    d0 = derivative_at_zero(psi)
    in_n = killing > 1e-12 or d0 < 0
    barrier = hi if psi.measure is None else min(hi, psi.measure.exp_barrier)
    in_n_beta = in_n and barrier >= beta - 1e-12
    root = find_rho(psi)
    direction = "n/a"
    if psi.measure is not None:
        direction, _ = tail_monotonicity(psi.measure, beta)
        tail_ok = direction in ("non-increasing", "constant")
        tail_check = "measure"
    else:
        nd = check_negative_definite(_raw_tilt(psi, beta), k=6, seed=20240601, trials=40)
        tail_ok = bool(nd)
        tail_check = "negative-definite proxy"
        notes.append("no Levy measure given; tail condition replaced by negative-definiteness of the tilt")
    lim = _limit_u_psi(psi, beta)
    lim_ok = math.isfinite(lim) and lim <= 1e-8
    in_rho = in_n_beta and root.finite and tail_ok and lim_ok
    if root.finite and not root.rho < beta:
        notes.append(f"rho={root.rho:g} is not below beta={beta:g}")
    return ClassFlags(
        in_n=bool(in_n),
        in_n_beta=bool(in_n_beta),
        in_n_beta_rho=bool(in_rho),
        beta=float(beta),
        rho=root.rho,
        rho_below_beta=bool(root.rho < beta),
        derivative_at_zero_plus=d0,
        killing=killing,
        tail_check=tail_check,
        tail_direction=direction,
        limit_u_psi=lim,
        notes=tuple(notes),
    )


def _circle_mean(f, centre, radius, m=16):
    k = np.arange(m)
    pts = centre + radius * np.exp(2j * np.pi * (k + 0.5) / m)
    return np.mean(np.asarray(f(pts), dtype=np.complex128))


def _tilt_function(parent: CharExponent, beta: float):
    def raw(z):
        z = np.asarray(z, dtype=np.complex128)
        return z / (z + beta) * np.asarray(evaluate(parent, z + beta), dtype=np.complex128)

    r = min(1e-2, beta / 4)

    def f(z):
        z = np.asarray(z, dtype=np.complex128)
        near0 = np.abs(z) < REMOVABLE_TOL
        nearb = np.abs(z + beta) < REMOVABLE_TOL
        ok = ~(near0 | nearb)
        out = np.empty(z.shape, dtype=np.complex128)
        if np.any(ok):
            out[ok] = raw(z[ok])
        if np.any(near0):
            out[near0] = _circle_mean(raw, 0.0, r)
        if np.any(nearb):
            out[nearb] = _circle_mean(raw, -beta, r)
        return out

    return f


def _raw_tilt(psi, beta):
    return CharExponent(
        name=f"T{beta:g}[{psi.describe()}]",
        closed_form=_tilt_function(psi, beta),
        strip=(psi.strip[0] - beta, psi.strip[1] - beta),
    )


def _tilted_measure(m: LevyMeasure, beta: float, q: float) -> LevyMeasure:
    dens, tp, tm = m.density, m.tail_plus, m.tail_minus

    def density(y):
        y = np.asarray(y, dtype=float)
        ya = np.abs(y)
        base_pos = np.asarray(dens(np.where(y > 0, y, 1.0)), dtype=float) - beta * np.asarray(tp(np.where(y > 0, y, 1.0)), dtype=float)
        base_neg = np.asarray(dens(np.where(y < 0, y, -1.0)), dtype=float) + beta * (np.asarray(tm(np.where(y < 0, ya, 1.0)), dtype=float) + q)
        base = np.where(y > 0, base_pos, base_neg)
        return _safe_scale(beta * y, base)

    def tail_plus(y):
        y = np.asarray(y, dtype=float)
        return _safe_scale(beta * y, np.asarray(tp(y), dtype=float))

    def tail_minus(y):
        y = np.asarray(y, dtype=float)
        return np.exp(-beta * y) * (np.asarray(tm(y), dtype=float) + q)

    return LevyMeasure(density, tail_plus, tail_minus, exp_barrier=m.exp_barrier - beta)


def _infer_drift(psi: CharExponent, z0: complex = 0.5j) -> float:
    # drift of a closed-form exponent whose other triplet entries are known
    bare = replace(psi, drift=0.0, closed_form=None)
    diff = (evaluate(psi, z0) - quadrature_eval(bare, z0)) / z0
    return float(diff.real)


def tilt(psi: CharExponent, beta: float, check: bool = True) -> CharExponent:
    """The exponent ``T_beta Psi(z) = z/(z+beta) Psi(z+beta)``.

    Raises
    ------
    InadmissibleTiltError
        If exponential moments stop before ``beta``, the tail condition fails
        or the killing of the tilt would be negative.
    """
    if beta <= 0:
        raise InadmissibleTiltError("beta must be positive")
    lo, hi = psi.strip
    problems = []
    if beta > hi + 1e-12:
        problems.append(f"no exponential moments up to beta={beta:g} (strip ends at {hi:g})")
    if check and psi.measure is not None and not problems:
        direction, worst = tail_monotonicity(psi.measure, beta)
        if direction not in ("non-increasing", "constant"):
            problems.append(f"e^(beta y) Pi_+(y) is {direction} (largest relative increase {worst:.2e})")
    f = _tilt_function(psi, beta)
    q_beta = float(np.real(f(np.array([0.0])))[0]) if not problems else math.nan
    if not problems and not (q_beta <= 1e-10):
        problems.append(f"limit q_beta={q_beta:.6g} is positive")
    if problems:
        raise InadmissibleTiltError(f"tilt of {psi.describe()} by beta={beta:g}: " + "; ".join(problems))
    # the limit is computed numerically; values at roundoff level are a zero killing rate
    killing = -q_beta if q_beta < -1e-12 else 0.0
    # a pole of Psi(z+beta) at z=-beta survives only when Psi(0) != 0
    psi0 = abs(complex(evaluate(psi, 0.0)))
    new_lo = -beta if psi0 > 1e-12 else lo - beta
    measure = None
    if psi.measure is not None:
        measure = _tilted_measure(psi.measure, beta, psi.killing)
    out = CharExponent(
        name=f"T{beta:g}[{psi.describe()}]",
        killing=killing,
        drift=math.nan,
        gaussian=psi.gaussian,
        measure=measure,
        strip=(max(new_lo, lo - beta), hi - beta),
        closed_form=f,
        params=dict(psi.params),
        meta={"tilt": beta, "parent": psi, "q_beta": q_beta},
    )
    if measure is not None:
        out = replace(out, drift=_infer_drift(out))
    elif psi.closed_form is None:  # pragma: no cover - every exponent has one of the two
        raise ExponentError("cannot tilt an exponent without measure or closed form")
    return out


def dual(psi: CharExponent) -> CharExponent:
    """Exponent of the negated process, ``z -> Psi(-z)``."""
    if psi.meta.get("dual_of") is not None:
        return psi.meta["dual_of"]
    cf = psi.closed_form
    measure = None
    if psi.measure is not None:
        m = psi.measure
        d = m.density
        measure = LevyMeasure(
            density=lambda y, d=d: d(-np.asarray(y, dtype=float)),
            tail_plus=m.tail_minus,
            tail_minus=m.tail_plus,
            exp_barrier=-psi.strip[0],
        )
    closed = None if cf is None else (lambda z, cf=cf: cf(-np.asarray(z, dtype=np.complex128)))
    out = CharExponent(
        name=f"dual[{psi.describe()}]",
        killing=psi.killing,
        drift=-psi.drift,
        gaussian=psi.gaussian,
        measure=measure,
        strip=(-psi.strip[1], -psi.strip[0]),
        closed_form=closed,
        params=dict(psi.params),
        meta={"dual_of": psi},
    )
    return out


def theorem_pair(psi: CharExponent):
    """``(Psi, dual(T_1 Psi), rho)`` for ``Psi`` in ``N_1(rho)`` with ``0 < rho < 1``."""
    flags = classify(psi, 1.0)
    if not flags.in_n_beta_rho:
        raise ExponentError(f"{psi.describe()} is not in N_1(rho): {flags.as_dict()}")
    rho = flags.rho
    if not (0.0 < rho < 1.0):
        raise ExponentError(f"{psi.describe()}: rho={rho} is not in (0, 1)")
    hat = dual(tilt(psi, 1.0))
    resid = abs(complex(evaluate(hat, 1.0 - rho)))
    if resid > 1e-9:
        raise ExponentError(f"dual tilt does not vanish at 1-rho: |Psi_1(1-rho)|={resid:.3e}")
    return psi, hat, rho


@dataclass(frozen=True)
class NDResult:
    """Outcome of :func:`check_negative_definite`; truthy when no violation was found."""

    ok: bool
    trials: int
    worst_ratio: float
    witness: Optional[dict] = None

    def __bool__(self) -> bool:
        return self.ok


def check_negative_definite(psi: CharExponent, k: int = 8, seed: int = 0, trials: int = 100, tol: float = 1e-8) -> NDResult:
    """Randomized test of the quadratic-form condition for ``f(x) = -Psi(-ix)``.

    For real points ``x_j`` and complex ``c_j`` with ``sum c_j = 0`` the form
    ``sum_{j,l} f(x_j - x_l) c_j conj(c_l)`` must have non-positive real part.
    A trial fails when the real part exceeds ``tol`` times
    ``sum |f_jl| |c_j| |c_l|``.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    rng = np.random.Generator(np.random.Philox(seed))
    worst = -math.inf
    for t in range(trials):
        scale = 10.0 ** rng.uniform(-1.0, 1.0)
        x = rng.uniform(-scale, scale, k)
        c = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        c -= c.mean()
        diff = x[:, None] - x[None, :]
        iu = np.triu_indices(k, 1)
        upper = -np.asarray(evaluate(psi, -1j * diff[iu]), dtype=np.complex128)
        f0 = -complex(evaluate(psi, 0.0))
        F = np.full((k, k), f0, dtype=np.complex128)
        F[iu] = upper
        # f(-x) = conj(f(x)) for a real Levy process
        F[(iu[1], iu[0])] = np.conj(upper)
        form = np.real(c @ F @ np.conj(c))
        bound = float(np.abs(c) @ np.abs(F) @ np.abs(c))
        ratio = form / bound if bound > 0 else 0.0
        worst = max(worst, ratio)
        if not np.isfinite(form) or ratio > tol:
            return NDResult(False, t + 1, float(ratio), {"x": x.tolist(), "c_re": c.real.tolist(), "c_im": c.imag.tolist(), "form": float(form)})
    return NDResult(True, trials, float(worst), None)


# ---------------------------------------------------------------- built-ins


def _zeros(y):
    return np.zeros(np.shape(y))


ZERO_MEASURE = LevyMeasure(_zeros, _zeros, _zeros, math.inf)


def brownian(a: float, sigma: float = 1.0, q: float = 0.0) -> CharExponent:
    """Brownian motion with drift ``a``, volatility ``sigma`` and killing ``q``."""
    if sigma < 0 or q < 0:
        raise ExponentError("sigma and q must be non-negative")
    return CharExponent(
        name="brownian",
        measure=ZERO_MEASURE,
        killing=float(q),
        drift=float(a),
        gaussian=float(sigma),
        closed_form=lambda z: a * z + 0.5 * sigma**2 * z * z - q,
        params={"a": float(a), "sigma": float(sigma), "q": float(q)},
    )


def lamperti_stable(alpha: float, rho: float) -> CharExponent:
    """Exponent of the Lamperti-stable process attached to ``(alpha, rho)``.

    ``Psi(z) = -Gamma(1+alpha z) Gamma(alpha - alpha z) /
    (Gamma(1 - alpha rho + alpha z) Gamma(alpha rho - alpha z))`` on the strip
    ``(-1/alpha, 1)``.
    """
    if not (0 < alpha < 2):
        raise ExponentError(f"alpha must lie in (0, 2), got {alpha}")
    if not (0 < rho < 1):
        raise ExponentError(f"rho must lie in (0, 1), got {rho}")
    if alpha > 1 and not (1 - 1 / alpha - 1e-12 <= rho <= 1 / alpha + 1e-12):
        raise ExponentError(f"rho={rho} is not attainable for alpha={alpha}; need [{1 - 1/alpha:g}, {1/alpha:g}]")
    a, r = float(alpha), float(rho)

    def f(z):
        z = np.asarray(z, dtype=np.complex128)
        return -gamma_ratio([1 + a * z, a - a * z], [1 - a * r + a * z, a * r - a * z])

    return CharExponent(
        name="lamperti",
        killing=float(np.real(gamma(a) * rgamma(1 - a * r) * rgamma(a * r))),
        drift=math.nan,
        closed_form=f,
        strip=(-1 / a, 1.0),
        params={"alpha": a, "rho": r},
    )


def spectrally_positive(alpha: float) -> CharExponent:
    """Spectrally positive exponent whose exponential functional is Frechet.

    ``Psi(z) = Gamma(1 + alpha - alpha z) / (alpha Gamma(-alpha z))`` with Levy
    tail ``K (e^{y/alpha} - 1)^{-alpha-1}`` on ``y > 0``.
    """
    if not (0 < alpha < 1):
        raise ExponentError(f"alpha must lie in (0, 1), got {alpha}")
    a = float(alpha)
    # K = 1 / (alpha (alpha + 1) Gamma(-alpha - 1)) = 1 / Gamma(1 - alpha)
    K = float(np.real(rgamma(1 - a)))
    logK = math.log(K)

    def tail_plus(y):
        y = np.asarray(y, dtype=float)
        yp = np.where(y > 0, y, 1.0)
        return np.where(y > 0, np.exp(logK - (a + 1) * _log_expm1(yp / a)), 0.0)

    def density(y):
        y = np.asarray(y, dtype=float)
        yp = np.where(y > 0, y, 1.0)
        v = np.exp(logK + math.log((a + 1) / a) + yp / a - (a + 2) * _log_expm1(yp / a))
        return np.where(y > 0, v, 0.0)

    def closed(z):
        z = np.asarray(z, dtype=np.complex128)
        return gamma_ratio([1 + a - a * z], [-a * z]) / a

    measure = LevyMeasure(density, tail_plus, lambda y: np.zeros_like(np.asarray(y, dtype=float)), exp_barrier=1 + 1 / a)
    psi = CharExponent(
        name="spos",
        killing=0.0,
        drift=math.nan,
        measure=measure,
        strip=(-math.inf, 1 + 1 / a),
        closed_form=closed,
        params={"alpha": a},
        meta={"levy_constant": K},
    )
    return replace(psi, drift=_infer_drift(psi))


def tilted_stable(alpha: float, rho: float) -> CharExponent:
    """Spectrally negative exponent ``z Gamma(alpha - alpha rho + alpha z) / Gamma(-alpha rho + alpha z)``.

    It is the dual of the tilt of :func:`spectrally_positive` by
    ``rho + 1/alpha``; it is conservative, drifts to ``-inf`` and vanishes at
    ``rho``.
    """
    if not (0 < alpha < 1):
        raise ExponentError(f"alpha must lie in (0, 1), got {alpha}")
    if not (0 < rho < 1):
        raise ExponentError(f"rho must lie in (0, 1), got {rho}")
    a, r = float(alpha), float(rho)
    base = dual(tilt(spectrally_positive(a), r + 1 / a))

    def closed(z):
        z = np.asarray(z, dtype=np.complex128)
        return z * gamma_ratio([a - a * r + a * z], [-a * r + a * z])

    return replace(
        base,
        name="tstable",
        closed_form=closed,
        strip=(r - 1.0, math.inf),
        params={"alpha": a, "rho": r},
        meta={},
    )


def from_closed_form(name: str, func: Callable, strip=(-math.inf, math.inf), params=None) -> CharExponent:
    """Wrap an arbitrary complex function as an exponent (no triplet known)."""
    return CharExponent(name=name, killing=math.nan, drift=math.nan, closed_form=func, strip=tuple(strip), params=dict(params or {}))
