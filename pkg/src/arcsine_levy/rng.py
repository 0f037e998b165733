"""Counter-based random streams.

Every random quantity in the package is drawn from a Philox stream addressed
by ``(key, index)``.  The key comes from a user seed plus string labels, the
index is a path number or a block number.  Because a stream depends only on
its address, results do not depend on how work is split between processes.
"""

from __future__ import annotations

import hashlib
import os
from concurrent.futures import ProcessPoolExecutor
import multiprocessing as mp

import numpy as np

__all__ = [
    "BLOCK",
    "derive_seed",
    "stream",
    "block_streams",
    "uniforms",
    "normals",
    "exponentials",
    "standard_gamma",
    "parallel_map",
    "default_workers",
]

# closed-form samplers draw in fixed blocks so output is independent of chunking
BLOCK = 65536

_MASK64 = (1 << 64) - 1


def derive_seed(seed: int, *labels) -> int:
    """Hash a seed and a tuple of labels into a new 64-bit seed."""
    h = hashlib.sha256()
    h.update(int(seed & _MASK64).to_bytes(8, "little"))
    for lab in labels:
        h.update(b"\x00")
        h.update(str(lab).encode("utf-8"))
    return int.from_bytes(h.digest()[:8], "little")


def _key(seed: int) -> np.ndarray:
    s = int(seed) & _MASK64
    return np.array([s, derive_seed(s, "philox-key-hi")], dtype=np.uint64)


def stream(seed: int, index: int) -> np.random.Generator:
    """Generator for sub-stream ``index`` of ``seed``."""
    counter = np.array([0, 0, int(index) & _MASK64, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=_key(seed), counter=counter))


def block_streams(seed: int, n: int):
    """Yield ``(generator, size)`` for consecutive blocks covering ``n`` draws."""
    nblocks = -(-n // BLOCK)
    for b in range(nblocks):
        yield stream(seed, b), min(BLOCK, n - b * BLOCK)


def _blocked(seed, n, draw):
    if n == 0:
        return np.empty(0)
    return np.concatenate([draw(g, m) for g, m in block_streams(seed, n)])


def uniforms(n: int, seed: int) -> np.ndarray:
    """``n`` uniforms on (0, 1)."""
    # random() is on [0, 1); flip to (0, 1] then away from 0
    return _blocked(seed, n, lambda g, m: 1.0 - g.random(m))


def normals(n: int, seed: int) -> np.ndarray:
    return _blocked(seed, n, lambda g, m: g.standard_normal(m))


def exponentials(n: int, seed: int) -> np.ndarray:
    return _blocked(seed, n, lambda g, m: g.standard_exponential(m))


def standard_gamma(shape: float, n: int, seed: int) -> np.ndarray:
    return _blocked(seed, n, lambda g, m: g.standard_gamma(shape, m))


def default_workers() -> int:
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:  # pragma: no cover
        return max(1, os.cpu_count() or 1)


_JOB = None


def _run_job(args):
    return _JOB(*args)


def parallel_map(fn, items, workers: int | None = None) -> list:
    """Map ``fn`` over ``items`` (each a tuple of arguments), preserving order.

    With more than one worker a fork-based process pool is used; ``fn`` may
    be a closure since it is inherited rather than pickled.
    """
    global _JOB
    items = list(items)
    workers = default_workers() if workers is None else int(workers)
    if workers <= 1 or len(items) <= 1:
        return [fn(*it) for it in items]
    try:
        ctx = mp.get_context("fork")
    except ValueError:  # pragma: no cover - platforms without fork
        return [fn(*it) for it in items]
    _JOB = fn
    try:
        with ProcessPoolExecutor(max_workers=min(workers, len(items)), mp_context=ctx) as ex:
            return list(ex.map(_run_job, items))
    finally:
        _JOB = None
