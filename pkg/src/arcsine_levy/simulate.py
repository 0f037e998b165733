"""Monte Carlo sampling of exponential functionals and stable suprema.

``I = int_0^{e_q} exp(xi_t) dt`` is accumulated with the trapezoid rule on
a grid of step ``dt``.  Killed paths draw ``e_q`` first and integrate up to
it (last step partial); conservative transient paths stop once
``exp(xi_t) / (|Psi'(0+)| I) < stop_epsilon``, an estimate of the relative
size of the remaining integral.

Each path reads its own counter-based stream ``(seed, path index)``, so the
output does not depend on the number of workers.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from numba import njit
from scipy import integrate

from . import rng
from .exponent import CharExponent, derivative_at_zero, evaluate

__all__ = [
    "SimulationError",
    "InfiniteRateError",
    "MaxStepsError",
    "PathConfig",
    "IncrementSampler",
    "make_sampler",
    "stable_sampler",
    "exp_functional",
    "skewness_for_rho",
    "stable_increments",
    "stable_supremum",
    "stable_suprema_nested",
    "dufresne_oracle",
    "write_samples",
    "read_samples",
    "config_hash",
    "cache_dir",
    "cached_samples",
    "CACHE_ENV",
    "MAGIC",
]

MAGIC = b"LEVYSMP1"
TAIL_TABLE_SIZE = 1 << 16
CACHE_ENV = "ARCSINE_LEVY_CACHE"


class SimulationError(RuntimeError):
    pass


class InfiniteRateError(SimulationError):
    pass


class MaxStepsError(SimulationError):
    pass


@dataclass(frozen=True)
class PathConfig:
    """Discretization of a path integral.

    Attributes
    ----------
    dt : float
        Time step.
    stop_epsilon : float
        Relative residual threshold of the transient stopping rule.
    max_steps : int
        Step budget per path; ``dt * max_steps`` bounds the horizon.
    kill_rate : float or None
        Killing rate ``q``; ``None`` takes the exponent's own.
    chunk : int
        Steps generated per batch of random numbers.
    """

    dt: float = 1e-3
    stop_epsilon: float = 1e-6
    max_steps: int = 20_000_000
    kill_rate: Optional[float] = None
    chunk: int = 8192

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not 0 < self.stop_epsilon < 1:
            raise ValueError("stop_epsilon must lie in (0, 1)")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")

    def as_dict(self) -> dict:
        return {"dt": self.dt, "stopEpsilon": self.stop_epsilon, "maxSteps": self.max_steps, "killRate": self.kill_rate}


@dataclass(frozen=True, eq=False)
class IncrementSampler:
    """Increment law of a (possibly approximated) Levy process.

    ``kind`` is ``"brownianDrift"``, ``"stable"`` or ``"compoundPoissonApprox"``.
    For the compound Poisson approximation, jumps with ``|y| >= epsilon``
    are kept exactly, smaller ones are replaced by their compensator (in
    ``drift``) and a Gaussian of variance ``gaussian_correction``.
    """

    kind: str
    drift: float
    sigma: float
    killing: float = 0.0
    small_jump_cutoff: float = 0.0
    gaussian_correction: float = 0.0
    rate_plus: float = 0.0
    rate_minus: float = 0.0
    decay_rate: float = 0.0
    params: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict, repr=False)

    @property
    def total_sigma(self) -> float:
        return math.sqrt(self.sigma**2 + self.gaussian_correction)

    @property
    def rate(self) -> float:
        return self.rate_plus + self.rate_minus

    def jump_sizes(self, u: np.ndarray, sign: float) -> np.ndarray:
        """Jump sizes from uniforms in ``(0, 1]`` by inverting the tail on ``[epsilon, inf)``."""
        t = self.tables["plus" if sign > 0 else "minus"]
        out = np.empty(np.size(u))
        _invert_tail(np.log(np.ravel(u)), t["s0"], t["ds"], t["y"], out)
        return sign * out

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            "drift": self.drift,
            "sigma": self.sigma,
            "killing": self.killing,
            "smallJumpCutoff": self.small_jump_cutoff,
            "gaussianCorrection": self.gaussian_correction,
            "ratePlus": self.rate_plus,
            "rateMinus": self.rate_minus,
            "decayRate": self.decay_rate,
            "params": dict(self.params),
        }


def _tail_table(tail, eps, n=TAIL_TABLE_SIZE):
    # y as a function of s = log(tail(y) / tail(eps)) on a uniform s-grid
    t0 = float(tail(eps))
    if not np.isfinite(t0):
        raise InfiniteRateError(f"tail at epsilon={eps:g} is not finite")
    if t0 <= 0:
        return None
    ymax = max(2 * eps, 1.0)
    while float(tail(ymax)) > 1e-17 * t0:
        ymax *= 2
        if ymax > 1e8:
            raise InfiniteRateError("tail does not decay")
    y = np.concatenate([np.geomspace(eps, 1.0, 20 * n) if eps < 1 else [eps], np.linspace(max(eps, 1.0), ymax, 20 * n)[1:]])
    s = np.log(np.maximum(np.asarray(tail(y), dtype=float), 1e-300) / t0)
    s = np.minimum.accumulate(s)
    grid = np.linspace(s[-1], 0.0, n)
    yg = np.interp(grid, s[::-1], y[::-1])
    return {"s0": float(grid[0]), "ds": float(grid[1] - grid[0]), "y": yg}


@njit(cache=True)
def _invert_tail(logu, s0, ds, ytab, out):
    n = ytab.shape[0]
    for i in range(logu.shape[0]):
        x = (logu[i] - s0) / ds
        if x <= 0.0:
            out[i] = ytab[0]
        else:
            k = int(x)
            if k >= n - 1:
                out[i] = ytab[n - 1]
            else:
                f = x - k
                out[i] = ytab[k] * (1.0 - f) + ytab[k + 1] * f


def _quad(f, a, b):
    if b <= a:
        return 0.0
    v, err = integrate.quad(f, a, b, limit=400, epsabs=1e-14, epsrel=1e-11)
    if not np.isfinite(v):
        raise SimulationError("quadrature failure while building the sampler")
    return float(v)


def make_sampler(psi: CharExponent, epsilon: float = 1e-3) -> IncrementSampler:
    """Increment sampler for ``psi``.

    Pure Brownian exponents are simulated exactly; otherwise the Levy
    measure is truncated at ``epsilon`` with a Gaussian small-jump correction.
    """
    m = psi.measure
    if m is None:
        raise SimulationError(f"{psi.describe()} has no Levy measure; cannot simulate its paths")
    if not np.isfinite(psi.drift):
        raise SimulationError(f"{psi.describe()}: drift unknown")
    q = float(psi.killing) if np.isfinite(psi.killing) else 0.0
    d0 = derivative_at_zero(psi)
    decay = max(-d0, 0.0)
    if not m.has_positive and not m.has_negative:
        return IncrementSampler("brownianDrift", psi.drift, psi.gaussian, killing=q, decay_rate=decay, params=dict(psi.params))
    dens = m.density
    tables = {}
    rates = {}
    comp = 0.0
    var = 0.0
    for sign, tail, key in ((1.0, m.tail_plus, "plus"), (-1.0, m.tail_minus, "minus")):
        if not (m.has_positive if sign > 0 else m.has_negative):
            rates[key] = 0.0
            continue
        t = _tail_table(tail, epsilon)
        rates[key] = float(tail(epsilon))
        if t is not None:
            tables[key] = t
        # compensator of jumps with epsilon <= |y| < 1 (or its negative when epsilon > 1)
        f = lambda y, s=sign: s * y * float(dens(s * y))
        comp += _quad(f, epsilon, 1.0) - _quad(f, 1.0, epsilon)
        var += _quad(lambda y, s=sign: y * y * float(dens(s * y)), 0.0, epsilon)
    return IncrementSampler(
        "compoundPoissonApprox",
        drift=psi.drift - comp,
        sigma=psi.gaussian,
        killing=q,
        small_jump_cutoff=epsilon,
        gaussian_correction=var,
        rate_plus=rates.get("plus", 0.0),
        rate_minus=rates.get("minus", 0.0),
        decay_rate=decay,
        params=dict(psi.params),
        tables=tables,
    )


@njit(cache=True)
def _ef_chunk(state, normals, mu, sd, dt, jstep, jfrac, jsize, stop_eps, decay, final_step, final_frac, step0):
    # state = [xi, I, exp(xi)]; returns (steps used, status) with status 0 running, 1 stopped, 2 killed
    xi = state[0]
    acc = state[1]
    ex = state[2]
    j = 0
    nj = jstep.shape[0]
    m = normals.shape[0]
    for k in range(m):
        g = step0 + k
        f_end = 1.0
        if g == final_step:
            f_end = final_frac
        inc = mu * dt * f_end + sd * math.sqrt(dt * f_end) * normals[k]
        fprev = 0.0
        eprev = ex
        jsum = 0.0
        while j < nj and jstep[j] == k:
            f = jfrac[j]
            if f < f_end:
                xb = xi + inc * (f / f_end) + jsum
                eb = math.exp(xb)
                acc += dt * (f - fprev) * 0.5 * (eprev + eb)
                jsum += jsize[j]
                eprev = math.exp(xb + jsize[j])
                fprev = f
            j += 1
        xi = xi + inc + jsum
        ex = math.exp(xi)
        acc += dt * (f_end - fprev) * 0.5 * (eprev + ex)
        if g == final_step:
            state[0] = xi
            state[1] = acc
            state[2] = ex
            return k + 1, 2
        if decay > 0.0 and ex < stop_eps * decay * acc:
            state[0] = xi
            state[1] = acc
            state[2] = ex
            return k + 1, 1
    state[0] = xi
    state[1] = acc
    state[2] = ex
    return m, 0


_EMPTY_I = np.empty(0, dtype=np.int64)
_EMPTY_F = np.empty(0, dtype=np.float64)


@njit(cache=True)
def _arrivals(exps, scale, x0, m, step, frac, start):
    # Poisson arrivals on [0, m) in step units; returns (count, position, done)
    x = x0
    j = start
    for i in range(exps.shape[0]):
        x += exps[i] * scale
        if x >= m:
            return j, x, True
        k = int(x)
        step[j] = k
        frac[j] = x - k
        j += 1
    return j, x, False


def _chunk_jumps(sampler: IncrementSampler, gen, m, dt):
    lam = sampler.rate
    if lam <= 0:
        return _EMPTY_I, _EMPTY_F, _EMPTY_F
    mean = lam * m * dt
    k = int(mean + 6 * math.sqrt(mean) + 16)
    step = np.empty(k, dtype=np.int64)
    frac = np.empty(k)
    nj, x, done = 0, 0.0, False
    while not done:
        if nj + k > step.size:
            step = np.concatenate([step, np.empty(k, dtype=np.int64)])
            frac = np.concatenate([frac, np.empty(k)])
        nj, x, done = _arrivals(gen.standard_exponential(k), 1.0 / (lam * dt), x, m, step, frac, nj)
    if nj == 0:
        return _EMPTY_I, _EMPTY_F, _EMPTY_F
    u = 1.0 - gen.random(nj)
    if sampler.rate_minus > 0 and sampler.rate_plus > 0:
        pos = gen.random(nj) < sampler.rate_plus / lam
        sizes = np.empty(nj)
        sizes[pos] = sampler.jump_sizes(u[pos], 1.0)
        sizes[~pos] = sampler.jump_sizes(u[~pos], -1.0)
    else:
        sizes = sampler.jump_sizes(u, 1.0 if sampler.rate_plus > 0 else -1.0)
    return step[:nj], frac[:nj], sizes


def _one_path(sampler: IncrementSampler, cfg: PathConfig, q: float, seed: int, index: int):
    gen = rng.stream(seed, index)
    dt = cfg.dt
    final_step, final_frac = -1, 1.0
    if q > 0:
        T = gen.standard_exponential() / q
        x = T / dt
        final_step = int(math.floor(x))
        final_frac = x - final_step
        if final_frac <= 0.0:
            final_step -= 1
            final_frac = 1.0
        if final_step < 0:
            return T, 1, False
    decay = sampler.decay_rate if q == 0 else 0.0
    state = np.array([0.0, 0.0, 1.0])
    sd = sampler.total_sigma
    step0 = 0
    while step0 < cfg.max_steps:
        m = min(cfg.chunk, cfg.max_steps - step0)
        if final_step >= 0:
            m = min(m, final_step + 1 - step0)
        normals = gen.standard_normal(m) if sd > 0 else np.zeros(m)
        js, jf, jz = _chunk_jumps(sampler, gen, m, dt)
        used, status = _ef_chunk(state, normals, sampler.drift, sd, dt, js, jf, jz, cfg.stop_epsilon, decay, final_step, final_frac, step0)
        step0 += used
        if status:
            return state[1], step0, False
    return state[1], step0, True


def _path_block(sampler, cfg, q, seed, lo, hi):
    out = np.empty(hi - lo)
    steps = np.empty(hi - lo, dtype=np.int64)
    flags = np.zeros(hi - lo, dtype=bool)
    for i in range(lo, hi):
        out[i - lo], steps[i - lo], flags[i - lo] = _one_path(sampler, cfg, q, seed, i)
    return out, steps, flags


@dataclass
class FunctionalBatch:
    samples: np.ndarray
    steps: np.ndarray
    exhausted: np.ndarray

    @property
    def exhausted_fraction(self) -> float:
        return float(self.exhausted.mean()) if self.exhausted.size else 0.0


def exp_functional(sampler: IncrementSampler, cfg: PathConfig, n: int, seed: int, workers: int = 1, return_batch: bool = False):
    """Sample ``n`` exponential functionals.

    Raises
    ------
    SimulationError
        If the process is neither killed nor drifting to ``-inf``.
    MaxStepsError
        If more than 1% of the paths exhaust ``cfg.max_steps``.
    """
    q = sampler.killing if cfg.kill_rate is None else float(cfg.kill_rate)
    if not (q > 0 or sampler.decay_rate > 0):
        raise SimulationError("the exponent is not in N: no killing and no drift to -infinity")
    workers = max(1, int(workers))
    nblocks = max(1, min(n, 4 * workers if workers > 1 else 1))
    edges = np.linspace(0, n, nblocks + 1).astype(int)
    jobs = [(sampler, cfg, q, seed, int(edges[b]), int(edges[b + 1])) for b in range(nblocks)]
    parts = rng.parallel_map(_path_block, jobs, workers=workers)
    batch = FunctionalBatch(
        np.concatenate([p[0] for p in parts]),
        np.concatenate([p[1] for p in parts]),
        np.concatenate([p[2] for p in parts]),
    )
    if batch.exhausted_fraction > 0.01:
        raise MaxStepsError(f"{batch.exhausted_fraction:.1%} of paths reached max_steps={cfg.max_steps}")
    return batch if return_batch else batch.samples


def dufresne_oracle(a: float, sigma: float, n: int, seed: int) -> np.ndarray:
    """Exact samples of ``int_0^inf exp(a t + sigma B_t) dt = 2 / (sigma^2 G_nu)``, ``nu = -2a/sigma^2``."""
    if not (a < 0 and sigma > 0):
        raise ValueError("dufresne_oracle needs a < 0 and sigma > 0")
    nu = -2.0 * a / sigma**2
    return 2.0 / (sigma**2 * rng.standard_gamma(nu, n, seed))


# ---------------------------------------------------------------- stable suprema


def skewness_for_rho(alpha: float, rho: float) -> float:
    """Skewness ``beta`` of a strictly stable law with positivity parameter ``rho``.

    Inverts ``rho = 1/2 + arctan(beta tan(pi alpha/2)) / (pi alpha)``.
    """
    if not (0 < alpha < 2):
        raise ValueError("alpha must lie in (0, 2)")
    if not (0 < rho < 1):
        raise ValueError("rho must lie in (0, 1)")
    if alpha > 1 and not (1 - 1 / alpha - 1e-12 <= rho <= 1 / alpha + 1e-12):
        raise ValueError(f"rho={rho} is not attainable for alpha={alpha}; need [{1 - 1/alpha:g}, {1/alpha:g}]")
    if alpha == 1:
        return 0.0
    return float(np.clip(math.tan(math.pi * alpha * (rho - 0.5)) / math.tan(math.pi * alpha / 2), -1.0, 1.0))


@njit(cache=True)
def _cms(alpha, beta, drift1, u, w, out):
    # strictly stable increments from uniforms u in [0,1) and exponentials w
    n = u.shape[0]
    if alpha == 1.0:
        for i in range(n):
            out[i] = math.tan(math.pi * (u[i] - 0.5)) + drift1
        return
    t = beta * math.tan(math.pi * alpha / 2)
    B = math.atan(t) / alpha
    S = (1.0 + t * t) ** (1.0 / (2.0 * alpha))
    for i in range(n):
        v = math.pi * (u[i] - 0.5)
        a = alpha * (v + B)
        out[i] = S * math.sin(a) / math.cos(v) ** (1.0 / alpha) * (math.cos(v - a) / w[i]) ** ((1.0 - alpha) / alpha)


@njit(cache=True)
def _nested_sup(x, scale, nlevels, out):
    # running maxima of the partial sums observed every 2^l steps, sup includes time 0
    s = 0.0
    for l in range(nlevels):
        out[l] = 0.0
    n = x.shape[0]
    for k in range(n):
        s += x[k] * scale
        idx = k + 1
        for l in range(nlevels):
            if idx % (1 << l) == 0:
                if s > out[l]:
                    out[l] = s
            else:
                break


def stable_increments(alpha: float, rho: float, n: int, gen: np.random.Generator) -> np.ndarray:
    """``n`` draws of ``X_1`` for the strictly stable process with parameters ``(alpha, rho)``."""
    beta = skewness_for_rho(alpha, rho)
    drift1 = math.tan(math.pi * (rho - 0.5)) if alpha == 1 else 0.0
    u = gen.random(n)
    w = gen.standard_exponential(n) if alpha != 1 else _EMPTY_F
    out = np.empty(n)
    _cms(float(alpha), beta, drift1, u, w, out)
    return out


def _sup_block(alpha, rho, n_steps, nlevels, seed, lo, hi):
    res = np.empty((hi - lo, nlevels))
    scale = (1.0 / n_steps) ** (1.0 / alpha)
    row = np.empty(nlevels)
    for i in range(lo, hi):
        x = stable_increments(alpha, rho, n_steps, rng.stream(seed, i))
        _nested_sup(x, scale, nlevels, row)
        res[i - lo] = row
    return res


def stable_suprema_nested(alpha: float, rho: float, n_steps: int, n: int, seed: int, levels: int = 1, workers: int = 1) -> dict:
    """Discrete suprema of a stable process on ``[0, 1]`` at nested grids.

    Simulates ``n_steps`` increments per path and returns ``{n_steps / 2^l: sup}``
    for ``l < levels``; coarser grids reuse the same paths, so comparisons
    between resolutions are not blurred by independent noise.  The discrete
    supremum is biased downwards, with a bias shrinking as the grid refines.
    """
    if n_steps & (n_steps - 1) and levels > 1:
        raise ValueError("n_steps must be a power of two for nested grids")
    skewness_for_rho(alpha, rho)
    workers = max(1, int(workers))
    nblocks = max(1, min(n, 4 * workers if workers > 1 else 1))
    edges = np.linspace(0, n, nblocks + 1).astype(int)
    jobs = [(float(alpha), float(rho), int(n_steps), int(levels), seed, int(edges[b]), int(edges[b + 1])) for b in range(nblocks)]
    parts = np.concatenate(rng.parallel_map(_sup_block, jobs, workers=workers), axis=0)
    return {n_steps >> l: parts[:, l].copy() for l in range(levels)}


def stable_supremum(alpha: float, rho: float, n_steps: int, n: int, seed: int, workers: int = 1) -> np.ndarray:
    """``sup_{k <= n_steps} X_{k/n_steps}`` for ``n`` independent stable paths."""
    return stable_suprema_nested(alpha, rho, n_steps, n, seed, levels=1, workers=workers)[n_steps]


def stable_sampler(alpha: float, rho: float) -> IncrementSampler:
    beta = skewness_for_rho(alpha, rho)
    return IncrementSampler("stable", drift=0.0, sigma=0.0, params={"alpha": alpha, "rho": rho, "beta": beta})


# ---------------------------------------------------------------- sample cache


def config_hash(config: dict) -> bytes:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str).encode()
    return hashlib.sha256(blob).digest()


def cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV, Path.home() / ".cache" / "arcsine_levy"))


_HEADER = struct.Struct("<8sQQ32s")


def write_samples(path, samples, seed: int, config: dict) -> Path:
    """Write samples as ``LEVYSMP1`` binary plus a JSON sidecar ``<path>.json``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    x = np.ascontiguousarray(samples, dtype="<f8")
    h = config_hash(config)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, x.size, int(seed) & ((1 << 64) - 1), h))
        fh.write(x.tobytes())
    meta = {"count": int(x.size), "seed": int(seed), "configHash": h.hex(), "config": config, "format": "LEVYSMP1 little-endian float64"}
    Path(str(path) + ".json").write_text(json.dumps(meta, sort_keys=True, indent=1, default=str) + "\n")
    return path


def read_samples(path):
    """Read a sample file; returns ``(samples, header dict)``."""
    path = Path(path)
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        if len(raw) < _HEADER.size:
            raise SimulationError(f"{path}: truncated header")
        magic, count, seed, h = _HEADER.unpack(raw)
        if magic != MAGIC:
            raise SimulationError(f"{path}: bad magic {magic!r}")
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != count:
        raise SimulationError(f"{path}: expected {count} values, found {data.size}")
    return data.astype(float), {"count": int(count), "seed": int(seed), "configHash": h.hex()}


def cached_samples(config: dict, seed: int, produce, directory=None) -> np.ndarray:
    """Return ``produce()``, reusing a cached file keyed by ``(config, seed)``.

    ``directory=None`` disables caching; ``True`` uses :func:`cache_dir`.
    """
    if directory is None or directory is False:
        return produce()
    d = cache_dir() if directory is True else Path(directory)
    h = config_hash(config)
    path = d / f"{h.hex()[:24]}-{int(seed)}.bin"
    if path.exists():
        try:
            data, head = read_samples(path)
            if head["configHash"] == h.hex() and head["seed"] == int(seed) & ((1 << 64) - 1):
                return data
        except SimulationError:
            pass
    data = np.asarray(produce(), dtype=float)
    write_samples(path, data, seed, config)
    return data
