"""Kolmogorov-Smirnov statistics with asymptotic p-values."""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np
from scipy.special import kolmogorov

__all__ = ["KSResult", "ks_one_sample", "ks_two_sample", "SampleSizeError", "MIN_SIZE"]

MIN_SIZE = 100


class SampleSizeError(ValueError):
    pass


class KSResult(NamedTuple):
    statistic: float
    pvalue: float
    n_eff: float


def _pvalue(d: float, n_eff: float) -> float:
    # Stephens' small-sample correction of the asymptotic argument
    sq = math.sqrt(n_eff)
    return float(min(1.0, max(0.0, kolmogorov((sq + 0.12 + 0.11 / sq) * d))))


def ks_one_sample(x, cdf: Callable) -> KSResult:
    """One-sample KS test of ``x`` against a continuous ``cdf``."""
    x = np.sort(np.asarray(x, dtype=float))
    n = x.size
    if n < MIN_SIZE:
        raise SampleSizeError(f"need at least {MIN_SIZE} samples, got {n}")
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    d = float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))
    return KSResult(d, _pvalue(d, n), float(n))


def ks_two_sample(x, y) -> KSResult:
    """Two-sample KS test; exact ``D`` over the pooled sample, asymptotic p-value."""
    x = np.sort(np.asarray(x, dtype=float))
    y = np.sort(np.asarray(y, dtype=float))
    n, m = x.size, y.size
    if min(n, m) < MIN_SIZE:
        raise SampleSizeError(f"need at least {MIN_SIZE} samples per side, got ({n}, {m})")
    pooled = np.concatenate([x, y])
    fx = np.searchsorted(x, pooled, side="right") / n
    fy = np.searchsorted(y, pooled, side="right") / m
    d = float(np.max(np.abs(fx - fy)))
    n_eff = n * m / (n + m)
    return KSResult(d, _pvalue(d, n_eff), float(n_eff))
