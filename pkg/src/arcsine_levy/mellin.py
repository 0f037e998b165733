"""Mellin transforms of positive random variables.

Throughout, ``M(w) = E[X^(w-1)]`` so that ``M(1) = 1``.  For an exponential
functional ``I`` of a Levy process with exponent ``Psi`` the transform solves

    M(z + 1) = -z / Psi(z) * M(z),

which is used here to verify closed forms, to continue them outside their
strip and to cross-check Monte Carlo estimates.  Densities are recovered by
numerical inversion along a vertical line or a parabolic contour.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .special import gamma_ratio

__all__ = [
    "MellinError",
    "MellinStripError",
    "PoleCrossingError",
    "InsufficientDecayError",
    "NoClosedFormError",
    "HeavyTailWarning",
    "MellinFunction",
    "RecurrenceSpec",
    "MCEstimate",
    "verify_recurrence",
    "extend_by_recurrence",
    "mc_mellin",
    "REGISTRY",
    "closed_form",
    "bernstein_gamma",
    "bernstein_residual",
    "phi_rho",
    "invert_to_density",
]


class MellinError(ValueError):
    pass


class MellinStripError(MellinError):
    pass


class PoleCrossingError(MellinError):
    pass


class InsufficientDecayError(MellinError):
    pass


class NoClosedFormError(MellinError):
    pass


class HeavyTailWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class MellinFunction:
    """``w -> E[X^(w-1)]`` with its strip of convergence and known poles.

    Calling the object enforces the strip; :meth:`continued` evaluates the
    meromorphic continuation anywhere off the poles.
    """

    func: Callable
    strip: tuple
    poles: tuple = ()
    name: str = "mellin"
    params: dict = field(default_factory=dict)
    norm: float = 1.0

    def continued(self, w):
        w = np.asarray(w, dtype=np.complex128)
        out = np.asarray(self.func(w), dtype=np.complex128) * self.norm
        return out.item() if w.ndim == 0 else out

    def in_strip(self, w) -> np.ndarray:
        re = np.real(np.asarray(w, dtype=np.complex128))
        lo, hi = self.strip
        return (re > lo) & (re < hi)

    def __call__(self, w):
        if not np.all(self.in_strip(w)):
            raise MellinStripError(f"{self.name}: Re w outside the strip ({self.strip[0]}, {self.strip[1]})")
        return self.continued(w)

    def moment(self, s):
        """``E[X^s]``."""
        return self(np.asarray(s, dtype=np.complex128) + 1.0)

    def describe(self) -> str:
        p = ",".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.name}:{p}" if p else self.name


def _normalized(func, strip, poles, name, params):
    raw = complex(np.asarray(func(np.array([1.0 + 0j])))[0])
    return MellinFunction(func=func, strip=strip, poles=tuple(poles), name=name, params=params, norm=1.0 / raw.real)


@dataclass(frozen=True, eq=False)
class RecurrenceSpec:
    """The ratio ``z -> M(z+1)/M(z) = -z/Psi(z)`` of a Mellin recurrence."""

    ratio: Callable
    psi: Callable
    valid: str = ""

    @classmethod
    def from_exponent(cls, psi) -> "RecurrenceSpec":
        from .exponent import evaluate

        def p(z):
            return evaluate(psi, z)

        def ratio(z):
            z = np.asarray(z, dtype=np.complex128)
            small = np.abs(z) < 1e-9
            out = np.empty(z.shape, dtype=np.complex128)
            ok = ~small
            if np.any(ok):
                out[ok] = -z[ok] / np.asarray(p(z[ok]), dtype=np.complex128)
            if np.any(small):
                # removable singularity when Psi(0) = 0; averaging on a small circle
                k = np.arange(16)
                c = 1e-3 * np.exp(2j * np.pi * (k + 0.5) / 16)
                out[small] = np.mean(-c / np.asarray(p(c), dtype=np.complex128))
            return out

        lo, hi = psi.strip
        return cls(ratio=ratio, psi=p, valid=f"Re z in ({lo:g}, {hi:g}) away from zeros of Psi")

    @classmethod
    def constant(cls, c: complex) -> "RecurrenceSpec":
        # M(z+1) = c M(z), i.e. Psi(z) = -z / c
        return cls(
            ratio=lambda z: np.full(np.shape(z), c, dtype=np.complex128),
            psi=lambda z: -np.asarray(z, dtype=np.complex128) / c,
            valid="all z",
        )


def _as_spec(psi_or_spec) -> RecurrenceSpec:
    if isinstance(psi_or_spec, RecurrenceSpec):
        return psi_or_spec
    return RecurrenceSpec.from_exponent(psi_or_spec)


def _near_pole(m: MellinFunction, w, tol):
    w = np.asarray(w, dtype=np.complex128)
    for loc, _order in m.poles:
        if np.any(np.abs(w - loc) < tol):
            return True
    return False


def verify_recurrence(m: MellinFunction, psi, grid, pole_tol: float = 1e-8) -> float:
    """Largest relative residual of ``M(z+1) Psi(z) + z M(z)`` over ``grid``.

    The residual is normalized by ``|M(z+1) Psi(z)| + |z M(z)|``.  ``psi`` is a
    :class:`~arcsine_levy.exponent.CharExponent` or a :class:`RecurrenceSpec`.
    """
    spec = _as_spec(psi)
    z = np.asarray(grid, dtype=np.complex128).ravel()
    if _near_pole(m, z, pole_tol) or _near_pole(m, z + 1, pole_tol):
        raise PoleCrossingError("grid point within pole tolerance of a pole of M")
    p = np.asarray(spec.psi(z), dtype=np.complex128)
    if np.any(np.abs(p) < pole_tol):
        raise PoleCrossingError("grid point at a zero of Psi")
    a = m.continued(z + 1) * p
    b = z * m.continued(z)
    denom = np.abs(a) + np.abs(b)
    return float(np.max(np.abs(a + b) / np.where(denom == 0, 1.0, denom)))


def extend_by_recurrence(m: MellinFunction, psi, z, base_strip: Optional[tuple] = None, base_values: Optional[Callable] = None, tol: float = 1e-10):
    """Continue ``M`` to ``z`` by telescoping the recurrence from a base strip.

    ``base_values`` may replace ``m`` on the base strip (for example with
    Monte Carlo estimates); it defaults to ``m`` itself.
    """
    spec = _as_spec(psi)
    lo, hi = base_strip if base_strip is not None else m.strip
    zc = complex(z)
    if lo < zc.real < hi:
        k = 0
    elif zc.real >= hi:
        k = math.ceil(zc.real - hi + 1e-12) if math.isfinite(hi) else 0
    else:
        k = -math.ceil(lo - zc.real + 1e-12)
    w0 = zc - k
    if not (lo < w0.real < hi):
        raise MellinStripError(f"{zc} is not reachable from the base strip ({lo}, {hi}) by integer shifts")
    base = base_values if base_values is not None else m.continued
    val = complex(base(w0))
    if k > 0:
        # M(w+1) = ratio(w) M(w) with ratio(w) = -w/Psi(w); a zero of Psi is a pole of M
        for j in range(k):
            w = w0 + j
            p = complex(spec.psi(w))
            if abs(p) < tol:
                raise PoleCrossingError(f"shift path crosses a zero of Psi at {w}")
            val *= complex(spec.ratio(np.array([w]))[0])
    elif k < 0:
        for j in range(-k):
            w = w0 - j - 1
            r = complex(spec.ratio(np.array([w]))[0])
            if abs(r) < tol or not np.isfinite(r):
                raise PoleCrossingError(f"shift path crosses a pole at {w}")
            val /= r
    return val


@dataclass(frozen=True)
class MCEstimate:
    estimate: complex
    standard_error: float
    se_real: float
    se_imag: float
    n: int

    def __iter__(self):
        return iter((self.estimate, self.standard_error))

    def sigma_distance(self, value) -> float:
        se = self.standard_error
        d = abs(complex(value) - self.estimate)
        # a zero standard error happens for constant terms, e.g. at z = 1
        if se <= 1e-12 * max(1.0, abs(self.estimate)):
            return 0.0 if d <= 1e-12 * max(1.0, abs(complex(value))) else math.inf
        return d / se


def mc_mellin(samples, z) -> MCEstimate:
    """Monte Carlo estimate of ``E[X^(z-1)]`` with its jackknife standard error.

    For a sample mean the jackknife standard error equals ``s / sqrt(n)``,
    which is what is computed.  A :class:`HeavyTailWarning` is issued when the
    largest 0.1% of the terms carry more than half of the total.
    """
    x = np.asarray(samples, dtype=float)
    if np.any(x <= 0):
        raise MellinError("samples must be positive")
    n = x.size
    zc = complex(z)
    terms = np.exp((zc - 1.0) * np.log(x))
    if n > 1 and np.all(terms == terms[0]):
        # degenerate sample: the mean is exact, avoid roundoff in the spread
        return MCEstimate(complex(terms[0]), 0.0, 0.0, 0.0, n)
    est = complex(terms.mean())
    if n > 1:
        se_re = float(np.std(terms.real, ddof=1) / math.sqrt(n))
        se_im = float(np.std(terms.imag, ddof=1) / math.sqrt(n))
    else:
        se_re = se_im = math.inf
    mag = np.abs(terms)
    top = max(1, n // 1000)
    total = mag.sum()
    if n >= 1000 and total > 0 and np.partition(mag, n - top)[n - top:].sum() > 0.5 * total:
        warnings.warn(f"E[X^(z-1)] at z={zc} is dominated by fewer than 0.1% of the samples", HeavyTailWarning, stacklevel=2)
    return MCEstimate(est, math.hypot(se_re, se_im), se_re, se_im, n)


# ---------------------------------------------------------------- closed forms


def _g(num, den):
    return gamma_ratio(num, den)


def pareto_mellin(a: float, b: float) -> MellinFunction:
    """``E[P^(w-1)] = Gamma(a-w+1) Gamma(b+w-1) / (Gamma(a) Gamma(b))``."""

    def f(w):
        return _g([a - w + 1, b + w - 1], [a, b])

    poles = [(1 + a, 1), (1 - b, 1)]
    return MellinFunction(f, (1 - b, 1 + a), tuple(poles), "pareto", {"a": a, "b": b})


def pareto_std_mellin(rho: float) -> MellinFunction:
    m = pareto_mellin(rho, 1 - rho)
    return MellinFunction(m.func, m.strip, m.poles, "pareto", {"rho": rho})


def arcsine_mellin(rho: float) -> MellinFunction:
    """``E[A^(w-1)] = B(rho+w-1, 1-rho)/B(rho, 1-rho) = Gamma(rho+w-1)/(Gamma(rho)Gamma(w))``."""

    def f(w):
        return _g([rho + w - 1], [rho, w])

    return MellinFunction(f, (1 - rho, math.inf), ((1 - rho, 1), (-rho, 1)), "arcsine", {"rho": rho})


def gamma_mellin(a: float) -> MellinFunction:
    def f(w):
        return _g([a + w - 1], [a])

    return MellinFunction(f, (1 - a, math.inf), ((1 - a, 1), (-a, 1)), "gamma", {"a": a})


def frechet_mellin(alpha: float) -> MellinFunction:
    def f(w):
        return _g([1 - alpha * (w - 1)], [])

    return MellinFunction(f, (-math.inf, 1 + 1 / alpha), ((1 + 1 / alpha, 1),), "frechet", {"alpha": alpha})


def stable_mellin(alpha: float) -> MellinFunction:
    """``E[S^(w-1)] = Gamma(1-(w-1)/alpha)/Gamma(1-(w-1))`` for a positive alpha-stable S."""

    def f(w):
        return _g([1 - (w - 1) / alpha], [2 - w])

    return MellinFunction(f, (-math.inf, 1 + alpha), ((1 + alpha, 1),), "stable", {"alpha": alpha})


def length_biased_mellin(alpha: float, gam: float) -> MellinFunction:
    """Mellin transform of ``S_gamma^(-alpha)``.

    ``E[Y^s] = Gamma(gamma+s) Gamma(alpha gamma) / (Gamma(alpha(gamma+s)) Gamma(gamma))``;
    ``Gamma(x)/Gamma(alpha x) = alpha Gamma(x+1)/Gamma(alpha x+1)`` removes the
    apparent singularity at ``gamma + s = 0``.
    """

    def f(w):
        x = gam + w - 1
        return alpha * _g([x + 1, alpha * gam], [alpha * x + 1, gam])

    return MellinFunction(f, (-gam, math.inf), ((-gam, 1),), "lbstable", {"alpha": alpha, "gamma": gam})


def dufresne_mellin(a: float, sigma: float = 1.0) -> MellinFunction:
    """Mellin transform of ``2/(sigma^2 G_nu)``, ``nu = -2a/sigma^2``."""
    nu = -2 * a / sigma**2
    c = math.log(2 / sigma**2)

    def f(w):
        return np.exp(c * (w - 1)) * _g([nu - w + 1], [nu])

    return MellinFunction(f, (-math.inf, 1 + nu), ((1 + nu, 1),), "dufresne", {"a": a, "sigma": sigma})


def lamperti_ef_mellin(alpha: float, rho: float, printed: bool = False) -> MellinFunction:
    """Exponential functional of ``Psi(z) = z Gamma(alpha-alpha rho+alpha z)/Gamma(-alpha rho+alpha z)``.

    ``M(w) = Gamma(w-rho) Gamma(alpha(1-rho)) Gamma(rho+1-w)
    / (Gamma(alpha(w-rho)) Gamma(1-rho) Gamma(rho))``, the law of
    ``S_{1-rho}^(-alpha) / G_rho``.  ``printed=True`` adds the factor
    ``alpha^(1-w)`` and is kept only for comparison.
    """
    la = math.log(alpha)

    def f(w):
        x = w - rho
        v = alpha * _g([x + 1, alpha * (1 - rho), rho + 1 - w], [alpha * x + 1, 1 - rho, rho])
        if printed:
            v = v * np.exp(-la * (w - 1))
        return v

    name = "lamperti-ef-printed" if printed else "lamperti-ef"
    return _normalized(f, (rho - 1, rho + 1), [(rho + 1, 1), (rho - 1, 1)], name, {"alpha": alpha, "rho": rho})


def lamperti_dual_ef_mellin(alpha: float, rho: float) -> MellinFunction:
    """``M(w) = Gamma(alpha(2-rho-w))/Gamma(alpha(1-rho))``, the law of ``G_{alpha(1-rho)}^(-alpha)``."""

    def f(w):
        return _g([alpha * (2 - rho - w)], [])

    return _normalized(f, (-math.inf, 2 - rho), [(2 - rho, 1)], "lamperti-dual-ef", {"alpha": alpha, "rho": rho})


def phi_rho(alpha: float, rho: float) -> Callable:
    """Bernstein function ``alpha z Gamma(alpha-alpha rho+alpha z)/Gamma(1-alpha rho+alpha z)``."""

    def phi(z):
        z = np.asarray(z, dtype=np.complex128)
        return alpha * z * _g([alpha - alpha * rho + alpha * z], [1 - alpha * rho + alpha * z])

    return phi


def bernstein_w_mellin(alpha: float, rho: float, printed: bool = False) -> MellinFunction:
    """``W(z+1) = Gamma(1-rho) Gamma(z+1) Gamma(alpha(z+1-rho)) / (Gamma(z+1-rho) Gamma(alpha(1-rho)))``.

    Stored as a function of ``w = z + 1``; ``printed=True`` multiplies by
    ``alpha^z``.
    """
    la = math.log(alpha)

    def f(w):
        x = w - rho
        # Gamma(alpha x)/Gamma(x) = Gamma(alpha x + 1)/(alpha Gamma(x + 1)), regular at x = 0
        v = _g([1 - rho, w, alpha * x + 1], [x + 1, alpha * (1 - rho)]) / alpha
        if printed:
            v = v * np.exp(la * (w - 1))
        return v

    name = "bernstein-gamma-printed" if printed else "bernstein-gamma"
    return _normalized(f, (0.0, math.inf), [(0.0, 1)], name, {"alpha": alpha, "rho": rho})


def _rec_pareto(p):
    return RecurrenceSpec.constant(-1.0)


def _rec_tstable(p):
    from .exponent import tilted_stable

    return RecurrenceSpec.from_exponent(tilted_stable(p["alpha"], p["rho"]))


def _rec_tstable_dual(p):
    from .exponent import dual, tilt, tilted_stable

    return RecurrenceSpec.from_exponent(dual(tilt(tilted_stable(p["alpha"], p["rho"]), 1.0)))


def _rec_frechet(p):
    from .exponent import spectrally_positive

    return RecurrenceSpec.from_exponent(spectrally_positive(p["alpha"]))


def _rec_dufresne(p):
    from .exponent import brownian

    return RecurrenceSpec.from_exponent(brownian(p["a"], p.get("sigma", 1.0)))


def _rec_bernstein(p):
    phi = phi_rho(p["alpha"], p["rho"])
    # W(z+1) = phi(z) W(z) corresponds to Psi(z) = -z / phi(z)
    return RecurrenceSpec(ratio=phi, psi=lambda z: -np.asarray(z, dtype=np.complex128) / phi(z), valid="Re z > 0")


@dataclass(frozen=True)
class RegistryEntry:
    build: Callable
    recurrence: Optional[Callable]
    params: tuple
    description: str


REGISTRY = {
    "pareto": RegistryEntry(lambda p: pareto_std_mellin(p["rho"]), _rec_pareto, ("rho",), "P_rho = G_(1-rho)/G_rho; M(z+1) = -M(z)"),
    "pareto2": RegistryEntry(lambda p: pareto_mellin(p["a"], p["b"]), None, ("a", "b"), "P_(a,b) = G_b/G_a"),
    "arcsine": RegistryEntry(lambda p: arcsine_mellin(p["rho"]), None, ("rho",), "Beta(rho, 1-rho)"),
    "gamma": RegistryEntry(lambda p: gamma_mellin(p["a"]), None, ("a",), "G_a"),
    "frechet": RegistryEntry(lambda p: frechet_mellin(p["alpha"]), _rec_frechet, ("alpha",), "e^(-alpha), functional of the spectrally positive exponent"),
    "stable": RegistryEntry(lambda p: stable_mellin(p["alpha"]), None, ("alpha",), "positive alpha-stable S"),
    "lbstable": RegistryEntry(lambda p: length_biased_mellin(p["alpha"], p["gamma"]), None, ("alpha", "gamma"), "S_gamma^(-alpha)"),
    "dufresne": RegistryEntry(lambda p: dufresne_mellin(p["a"], p.get("sigma", 1.0)), _rec_dufresne, ("a", "sigma"), "2/(sigma^2 G_nu)"),
    "lamperti-ef": RegistryEntry(lambda p: lamperti_ef_mellin(p["alpha"], p["rho"]), _rec_tstable, ("alpha", "rho"), "I of the tilted stable exponent"),
    "lamperti-ef-printed": RegistryEntry(lambda p: lamperti_ef_mellin(p["alpha"], p["rho"], printed=True), _rec_tstable, ("alpha", "rho"), "as above with an extra alpha^(1-w)"),
    "lamperti-dual-ef": RegistryEntry(lambda p: lamperti_dual_ef_mellin(p["alpha"], p["rho"]), _rec_tstable_dual, ("alpha", "rho"), "I of the dual tilt"),
    "bernstein-gamma": RegistryEntry(lambda p: bernstein_w_mellin(p["alpha"], p["rho"]), _rec_bernstein, ("alpha", "rho"), "W_phi for phi_rho"),
    "bernstein-gamma-printed": RegistryEntry(lambda p: bernstein_w_mellin(p["alpha"], p["rho"], printed=True), _rec_bernstein, ("alpha", "rho"), "as above with an extra alpha^z"),
}


def closed_form(name: str, **params):
    """Build a registered closed form; returns ``(MellinFunction, RecurrenceSpec or None)``."""
    if name not in REGISTRY:
        raise KeyError(f"unknown closed form {name!r}; known: {', '.join(sorted(REGISTRY))}")
    entry = REGISTRY[name]
    missing = [k for k in entry.params if k not in params and not (k == "sigma")]
    if missing:
        raise KeyError(f"{name}: missing parameter(s) {', '.join(missing)}")
    p = {k: float(v) for k, v in params.items()}
    m = entry.build(p)
    rec = entry.recurrence(p) if entry.recurrence is not None else None
    return m, rec


def bernstein_gamma(phi: Callable, closed: Optional[MellinFunction], z, verify: bool = False, grid=None):
    """Evaluate the Bernstein-gamma function ``W_phi`` at ``z`` (``W(1) = 1``).

    Only registered closed forms are supported.  With ``verify=True`` the
    recurrence ``W(z+1) = phi(z) W(z)`` is checked on ``grid`` first and a
    :class:`MellinError` is raised if the residual exceeds ``1e-11``.
    """
    if closed is None:
        raise NoClosedFormError("no closed form registered for this Bernstein function")
    if verify:
        r = bernstein_residual(phi, closed, grid)
        if r > 1e-11:
            raise MellinError(f"Bernstein-gamma recurrence residual {r:.3e} exceeds 1e-11")
    return closed.continued(z)


def bernstein_residual(phi: Callable, W: MellinFunction, grid=None) -> float:
    if grid is None:
        t = np.linspace(-5, 5, 21)
        grid = (0.25 + 1.5 * np.arange(5) / 4)[:, None] + 1j * t[None, :]
    z = np.asarray(grid, dtype=np.complex128).ravel()
    a = W.continued(z + 1)
    b = phi(z) * W.continued(z)
    return float(np.max(np.abs(a - b) / (np.abs(a) + np.abs(b))))


# ---------------------------------------------------------------- inversion


@dataclass(frozen=True)
class _Envelope:
    scale: float
    power: float
    rate: float


def _fit_envelope(m: MellinFunction, c: float) -> _Envelope:
    t = np.geomspace(1.0, 200.0, 60)
    with np.errstate(divide="ignore", under="ignore"):
        lm = np.log(np.abs(m.continued(c + 1j * t)))
    ok = np.isfinite(lm)
    if ok.sum() < 10:
        return _Envelope(1.0, 0.0, math.inf)
    A = np.column_stack([np.ones(ok.sum()), np.log(t[ok]), -t[ok]])
    coef, *_ = np.linalg.lstsq(A, lm[ok], rcond=None)
    logc, p, k = coef
    # inflate the constant so the envelope dominates every fitted point
    slack = float(np.max(lm[ok] - A @ coef))
    return _Envelope(math.exp(logc + max(slack, 0.0)) * 1.01, float(p), float(k))


def _vertical(m, c, x, env, tail_tol):
    lx = math.log(x)
    h = min(0.05, math.pi / (4 * abs(lx) + 4))
    # tail beyond T bounded by scale * T^p e^{-k T} / k (for T large enough)
    T = 10.0
    while env.scale * T ** max(env.power, 0.0) * math.exp(-env.rate * T) / env.rate * x ** (-c) / math.pi > tail_tol:
        T *= 1.25
        if T > 1e5:
            raise InsufficientDecayError("truncation point exceeds 1e5")
    t = np.arange(0.0, T + h, h)
    vals = np.real(m.continued(c + 1j * t) * np.exp(-1j * t * lx))
    wts = np.full(t.size, h)
    wts[0] = h / 2
    return float(x ** (-c) / math.pi * np.dot(wts, vals))


def _parabolic(m, c, x, tail_tol):
    s = -math.log(x)
    side = 1.0 if s > 0 else -1.0
    # poles on the side the contour bends towards
    dists = [side * (c - loc) for loc, _ in m.poles if side * (c - loc) > 0]
    gap = min(dists) if dists else 1.0
    mu = gap
    # the pole nearest to the real u-axis sits at distance 1 when mu <= gap
    d = 1.0
    h = d / 6.0
    U = math.sqrt(40.0 / (mu * abs(s)))
    if 2 * U / h > 2e6:
        raise InsufficientDecayError(f"x={x:g} is too close to 1 for the deformed contour ({2 * U / h:.2g} nodes)")
    u = np.arange(-U, U + h / 2, h)
    w = c + side * mu * ((1j * u + 1.0) ** 2 - 1.0)
    dw = side * mu * 2j * (1j * u + 1.0)
    vals = m.continued(w) * np.exp(s * w) * dw
    return float(np.real(h * vals.sum() / (2j * math.pi)))


def invert_to_density(m: MellinFunction, c: Optional[float], x: float, tail_tol: float = 1e-9, method: str = "auto") -> float:
    """Density at ``x`` from ``f(x) = (1/2 pi i) int M(w) x^(-w) dw``.

    The vertical line ``Re w = c`` is used when ``|M(c+it)|`` decays
    exponentially (fitted ``C t^p e^(-k t)`` envelope); step
    ``h = min(0.05, pi/(4|log x|+4))`` and truncation with tail bound below
    ``tail_tol``.  Otherwise, when every pole of ``M`` is real, the line is
    deformed into a parabola opening away from ``x^(-w)``'s growth and the
    trapezoid rule is applied there.
    """
    if x <= 0:
        raise ValueError("x must be positive")
    lo, hi = m.strip
    if c is None:
        if math.isfinite(lo) and math.isfinite(hi):
            c = 0.5 * (lo + hi)
        elif math.isfinite(lo):
            c = lo + 0.5
        elif math.isfinite(hi):
            c = hi - 0.5
        else:
            c = 1.0
    if not (lo < c < hi):
        raise MellinStripError(f"c={c} is outside the strip {m.strip}")
    env = _fit_envelope(m, c)
    exponential = env.rate > 0.1
    if method == "vertical" or (method == "auto" and exponential):
        if not exponential:
            raise InsufficientDecayError(f"{m.describe()}: no exponential decay on Re w = {c}")
        return _vertical(m, c, x, env, tail_tol)
    if abs(math.log(x)) < 1e-12:
        raise InsufficientDecayError(f"{m.describe()}: algebraic decay and x = 1 leaves no contour to deform")
    return _parabolic(m, c, x, tail_tol)
