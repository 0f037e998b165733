"""Complex gamma-family functions.

All functions accept scalars or array-likes and broadcast like numpy ufuncs.
Complex results are returned as ``complex``/``complex128``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PoleError",
    "DomainError",
    "log_gamma",
    "gamma",
    "rgamma",
    "gamma_ratio",
    "sinpi",
    "beta_fn",
    "betainc_reg",
    "DecayEnvelope",
    "stirling_envelope",
]

POLE_TOL = 1e-12

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_P = np.array(
    [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ]
)
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)
_LOG_PI = np.log(np.pi)


class PoleError(ValueError):
    """Raised when a gamma function is evaluated at (or next to) a pole."""


class DomainError(ValueError):
    """Raised for arguments outside a function's real domain."""


def _as_complex(z):
    return np.asarray(z, dtype=np.complex128)


def _wrap(out, like):
    if np.ndim(like) == 0:
        return out.item() if isinstance(out, np.ndarray) else out
    return out


def _near_pole(z: np.ndarray) -> np.ndarray:
    n = np.round(z.real)
    return (n <= 0) & (np.abs(z - n) < POLE_TOL)


def sinpi(z):
    """``sin(pi*z)`` with argument reduction, exact zeros at integers."""
    zc = _as_complex(z)
    n = np.round(zc.real)
    r = zc - n
    sign = np.where(np.mod(n, 2.0) == 0.0, 1.0, -1.0)
    return _wrap(sign * np.sin(np.pi * r), z)


def _log_sinpi(z: np.ndarray) -> np.ndarray:
    # log(sin(pi*z)) up to a multiple of 2*pi*i, safe for large |Im z|;
    # exact zeros map to -inf
    n = np.round(z.real)
    r = z - n
    up = r.imag >= 0
    e = np.where(up, np.expm1(2j * np.pi * np.where(up, r, 0)), -np.expm1(-2j * np.pi * np.where(up, 0, r)))
    with np.errstate(divide="ignore"):
        out = np.where(up, -1j * np.pi * r, 1j * np.pi * r) + np.log(e / 2j)
    odd = np.mod(n, 2.0) != 0.0
    return out + np.where(odd, 1j * np.pi, 0.0)


def _lanczos_log_gamma(z: np.ndarray) -> np.ndarray:
    # valid for Re z >= 0.5
    zm = z - 1.0
    x = np.full(zm.shape, _LANCZOS_P[0], dtype=np.complex128)
    for i in range(1, len(_LANCZOS_P)):
        x = x + _LANCZOS_P[i] / (zm + i)
    t = zm + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (zm + 0.5) * np.log(t) - t + np.log(x)


def log_gamma(z):
    """Principal branch of the log-gamma function.

    Matches the usual analytic continuation from the positive real axis with
    a branch cut along the negative real axis; on the cut the value is the
    limit from above (imaginary part ``-k*pi``), the convention used by mpmath.

    Raises
    ------
    PoleError
        If any argument lies within ``1e-12`` of a non-positive integer.
    """
    zc = _as_complex(z)
    if np.any(_near_pole(zc)):
        raise PoleError(f"log_gamma evaluated at a pole: {z!r}")
    out = np.empty(zc.shape, dtype=np.complex128)
    right = zc.real >= 0.5
    if np.any(right):
        out[right] = _lanczos_log_gamma(zc[right])
    left = ~right
    if np.any(left):
        zl = zc[left]
        refl = _LOG_PI - _log_sinpi(zl) - _lanczos_log_gamma(1.0 - zl)
        # pick the 2*pi*k sheet from the recurrence log G(z) = log G(z+n) - sum log(z+j)
        nshift = np.ceil(0.5 - zl.real).astype(np.int64)
        # points on the negative real axis take the upper side of the cut
        zl_arg = zl.real + 1j * np.where(zl.imag == 0.0, 0.0, zl.imag)
        im = _lanczos_log_gamma(zl + nshift).imag
        for j in range(int(nshift.max())):
            active = j < nshift
            im = im - np.where(active, np.angle(zl_arg + j), 0.0)
        k = np.round((im - refl.imag) / (2.0 * np.pi))
        out[left] = refl + 2j * np.pi * k
    return _wrap(out, z)


def gamma(z):
    """Complex gamma function, ``exp(log_gamma(z))``."""
    return _wrap(np.exp(_as_complex(log_gamma(z))), z)


def rgamma(z):
    """Reciprocal gamma function ``1/Gamma(z)``; entire, zero at the poles of Gamma."""
    zc = _as_complex(z)
    out = np.empty(zc.shape, dtype=np.complex128)
    right = zc.real >= 0.5
    if np.any(right):
        out[right] = np.exp(-_lanczos_log_gamma(zc[right]))
    left = ~right
    if np.any(left):
        zl = zc[left]
        with np.errstate(divide="ignore"):
            out[left] = np.exp(_log_sinpi(zl) - _LOG_PI + _lanczos_log_gamma(1.0 - zl))
    return _wrap(out, z)


def gamma_ratio(num, den):
    """``prod(Gamma(num)) / prod(Gamma(den))`` evaluated in log space.

    ``num`` and ``den`` are sequences of broadcast-compatible arguments.
    Denominator arguments at poles of Gamma give an exact zero, numerator
    poles raise :class:`PoleError`.
    """
    num = [_as_complex(a) for a in num]
    den = [_as_complex(a) for a in den]
    shape = np.broadcast_shapes(*(a.shape for a in num + den)) if num or den else ()
    logv = np.zeros(shape, dtype=np.complex128)
    mult = np.ones(shape, dtype=np.complex128)
    for a in num:
        logv = logv + np.broadcast_to(_as_complex(log_gamma(a)), shape)
    for a in den:
        a = np.broadcast_to(a, shape)
        right = a.real >= 0.5
        contrib = np.zeros(shape, dtype=np.complex128)
        if np.any(right):
            contrib[right] = -_lanczos_log_gamma(a[right])
        left = ~right
        if np.any(left):
            al = a[left]
            zero = (al.imag == 0) & (al.real == np.round(al.real))
            safe = np.where(zero, 0.5, al)
            contrib[left] = _log_sinpi(safe) - _LOG_PI + _lanczos_log_gamma(1.0 - safe)
            m = np.ones(al.shape, dtype=np.complex128)
            m[zero] = 0.0
            mult[left] = mult[left] * m
        logv = logv + contrib
    out = mult * np.exp(logv)
    if all(np.ndim(a) == 0 for a in num + den):
        return complex(out)
    return out


def beta_fn(a: float, b: float) -> float:
    """Euler beta function ``Gamma(a)Gamma(b)/Gamma(a+b)`` for ``a, b > 0``."""
    if not (a > 0 and b > 0):
        raise DomainError(f"beta_fn needs positive arguments, got ({a}, {b})")
    return float(np.exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b)).real)


def _betacf(a, b, x, max_iter=300, tol=1e-15):
    # modified Lentz evaluation of the incomplete-beta continued fraction
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < tiny, tiny, d)
    d = 1.0 / d
    h = d.copy()
    done = np.zeros(x.shape, dtype=bool)
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1.0 / d
        h = np.where(done, h, h * d * c)
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1.0 / d
        delta = d * c
        h = np.where(done, h, h * delta)
        done |= np.abs(delta - 1.0) < tol
        if done.all():
            break
    return h


def betainc_reg(a: float, b: float, x):
    """Regularized incomplete beta function ``I_x(a, b)`` by continued fractions."""
    if not (a > 0 and b > 0):
        raise DomainError(f"betainc_reg needs positive shape parameters, got ({a}, {b})")
    xs = np.asarray(x, dtype=float)
    xa = np.clip(xs, 0.0, 1.0)
    out = np.empty(xa.shape)
    inner = (xa > 0.0) & (xa < 1.0)
    out[xa <= 0.0] = 0.0
    out[xa >= 1.0] = 1.0
    if np.any(inner):
        xi = xa[inner]
        lbeta = (log_gamma(a) + log_gamma(b) - log_gamma(a + b)).real
        front = np.exp(a * np.log(xi) + b * np.log1p(-xi) - lbeta)
        direct = xi < (a + 1.0) / (a + b + 2.0)
        res = np.empty(xi.shape)
        if np.any(direct):
            xd = xi[direct]
            res[direct] = front[direct] * _betacf(a, b, xd) / a
        if np.any(~direct):
            xr = xi[~direct]
            res[~direct] = 1.0 - front[~direct] * _betacf(b, a, 1.0 - xr) / b
        out[inner] = res
    if np.ndim(x) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class DecayEnvelope:
    """Bound ``|Gamma(a+ib)| <= scale * |b|**(a-1/2) * exp(-exponent_rate*|b|)``."""

    a: float
    scale: float
    exponent_rate: float = np.pi / 2
    b_min: float = 1.0

    @property
    def power(self) -> float:
        return self.a - 0.5

    def __call__(self, b):
        b = np.abs(np.asarray(b, dtype=float))
        return self.scale * b**self.power * np.exp(-self.exponent_rate * b)

    def log_ratio(self, b):
        """``log(|Gamma(a+ib)| / envelope(b))``; non-positive where the bound holds."""
        b = np.abs(np.asarray(b, dtype=float))
        lg = np.real(log_gamma(self.a + 1j * b))
        return lg - (np.log(self.scale) + self.power * np.log(b) - self.exponent_rate * b)


def stirling_envelope(a: float, b_min: float, b_max: float = 1000.0, n_grid: int = 4000) -> DecayEnvelope:
    """Fit the constant of the Stirling decay bound for ``|Gamma(a+ib)|``, ``|b| >= b_min``.

    The constant is the largest observed ratio on a log-spaced grid, and never
    less than the limiting value ``sqrt(2*pi)``.
    """
    if b_min <= 0:
        raise DomainError("b_min must be positive")
    b = np.geomspace(b_min, max(b_max, 2 * b_min), n_grid)
    lg = np.real(log_gamma(a + 1j * b))
    log_ratio = lg - (a - 0.5) * np.log(b) + 0.5 * np.pi * b
    scale = max(float(np.exp(log_ratio.max())), np.sqrt(2 * np.pi)) * (1.0 + 1e-12)
    return DecayEnvelope(a=a, scale=scale, b_min=b_min)
