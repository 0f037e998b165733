"""Exponent specifications and experiment configuration.

Exponent specs
--------------
``name:key=value,key=value`` with the built-in names

=============  ==========================  =====================================
name           parameters                  exponent
=============  ==========================  =====================================
brownian       a, sigma (1), q (0)         ``a z + sigma^2 z^2 / 2 - q``
lamperti       alpha, rho                  Lamperti-stable exponent
spos           alpha                       spectrally positive, Frechet functional
tstable        alpha, rho                  tilted stable (dual tilt of ``spos``)
quadruplet     q, a, sigma, density, ...   Levy-Khintchine quadruplet
=============  ==========================  =====================================

Parameter values may be arithmetic expressions (``rho=1/3``).  For
``quadruplet`` the fields are separated by ``;`` because expressions can
contain commas::

    quadruplet:q=0;a=-0.5;sigma=1;density=exp(-2*abs(y));barrier=2

``density`` is an expression in ``y`` (both signs; use ``(y>0)`` factors
for one-sided measures); optional ``tail_plus`` / ``tail_minus`` give
``Pi((y, inf))`` and ``Pi((-inf, -y))`` for ``y > 0`` and are otherwise
integrated numerically; ``barrier`` is the exponential-moment bound (upper
end of the strip, default ``inf``).

Experiment files
----------------
``key = value`` lines (``#`` comments) or a JSON object with the keys of
:data:`CONFIG_SCHEMA`.  A value ``v1 | v2 | ...`` in a key=value file makes
a grid: :func:`expand_grid` returns the Cartesian product of all such keys.
"""

from __future__ import annotations

import ast
import itertools
import json
import math
import operator
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import special as sps
from scipy.interpolate import PchipInterpolator

from . import exponent as ex

__all__ = [
    "SpecError",
    "safe_eval",
    "compile_expr",
    "parse_params",
    "parse_exponent",
    "parse_closed_form",
    "CONFIG_SCHEMA",
    "load_config",
    "validate_config",
    "expand_grid",
]


class SpecError(ValueError):
    pass


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNOPS = {ast.USub: operator.neg, ast.UAdd: operator.pos}
_CMPS = {ast.Gt: operator.gt, ast.GtE: operator.ge, ast.Lt: operator.lt, ast.LtE: operator.le}
_FUNCS = {
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "expm1": np.expm1,
    "log1p": np.log1p,
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "gamma": sps.gamma,
    "where": np.where,
    "minimum": np.minimum,
    "maximum": np.maximum,
}
_CONSTS = {"pi": math.pi, "e": math.e, "inf": math.inf}


def _eval(node, env):
    if isinstance(node, ast.Expression):
        return _eval(node.body, env)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return float(node.value)
    if isinstance(node, ast.Name):
        if node.id in env:
            return env[node.id]
        if node.id in _CONSTS:
            return _CONSTS[node.id]
        raise SpecError(f"unknown name {node.id!r}")
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval(node.left, env), _eval(node.right, env))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
        return _UNOPS[type(node.op)](_eval(node.operand, env))
    if isinstance(node, ast.Compare) and len(node.ops) == 1 and type(node.ops[0]) in _CMPS:
        r = _CMPS[type(node.ops[0])](_eval(node.left, env), _eval(node.comparators[0], env))
        return np.asarray(r, dtype=float) if isinstance(r, np.ndarray) else float(r)
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS and not node.keywords:
        return _FUNCS[node.func.id](*(_eval(a, env) for a in node.args))
    raise SpecError(f"unsupported expression element: {ast.dump(node)[:60]}")


def safe_eval(expr: str, **env) -> float:
    """Evaluate an arithmetic expression (numbers, + - * / **, a few functions)."""
    try:
        tree = ast.parse(expr.strip(), mode="eval")
    except SyntaxError as exc:
        raise SpecError(f"cannot parse expression {expr!r}") from exc
    with np.errstate(all="ignore"):
        return _eval(tree, env)


def compile_expr(expr: str, var: str = "y") -> Callable:
    """Vectorized function of one variable from an expression string."""
    try:
        tree = ast.parse(expr.strip(), mode="eval")
    except SyntaxError as exc:
        raise SpecError(f"cannot parse expression {expr!r}") from exc
    _eval(tree, {var: np.array([0.5])})  # fail early on unknown names

    def f(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            v = _eval(tree, {var: x})
        return np.broadcast_to(np.asarray(v, dtype=float), x.shape).copy()

    return f


def parse_params(body: str, sep: str = ",") -> dict:
    out = {}
    if not body.strip():
        return out
    for item in body.split(sep):
        if "=" not in item:
            raise SpecError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        k = k.strip()
        if not k.isidentifier():
            raise SpecError(f"bad parameter name {k!r}")
        if k in out:
            raise SpecError(f"duplicate parameter {k!r}")
        out[k] = v.strip()
    return out


def _split(spec: str):
    if ":" in spec:
        name, body = spec.split(":", 1)
    else:
        name, body = spec, ""
    return name.strip().lower(), body


def _numbers(params: dict, required, optional=None) -> dict:
    optional = optional or {}
    unknown = set(params) - set(required) - set(optional)
    if unknown:
        raise SpecError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
    missing = [k for k in required if k not in params]
    if missing:
        raise SpecError(f"missing parameter(s): {', '.join(missing)}")
    out = dict(optional)
    for k, v in params.items():
        val = safe_eval(v)
        if not isinstance(val, float) or math.isnan(val):
            raise SpecError(f"parameter {k}={v!r} is not a number")
        out[k] = val
    return out


_TAIL_GRID_MIN = 1e-9


def _tail_from_density(dens: Callable, sign: float) -> Callable:
    # Pi((y, inf)) (or the mirrored tail) by Gauss-Legendre panels on a log grid
    ymax = 1.0
    while ymax < 1e4 and np.any(np.abs(dens(sign * np.linspace(ymax, 2 * ymax, 8))) > 1e-300):
        ymax *= 2
    edges = np.geomspace(_TAIL_GRID_MIN, ymax, 4001)
    xg, wg = np.polynomial.legendre.leggauss(8)
    a, b = edges[:-1, None], edges[1:, None]
    pts = 0.5 * (b - a) * xg[None, :] + 0.5 * (a + b)
    panel = (0.5 * (b - a)[:, 0]) * (dens(sign * pts) @ wg)
    tail = np.concatenate([np.cumsum(panel[::-1])[::-1], [0.0]])
    if not np.all(np.isfinite(tail)):
        raise SpecError("Levy density is not integrable away from 0")
    logt = PchipInterpolator(np.log(edges), np.log(np.maximum(tail, 1e-300)))

    def f(y):
        y = np.asarray(y, dtype=float)
        yp = np.clip(y, _TAIL_GRID_MIN, ymax)
        v = np.exp(logt(np.log(yp)))
        v = np.where((y >= ymax) | (v <= 1e-299), 0.0, v)
        return np.where(y > 0, v, 0.0)

    return f


def _quadruplet(body: str) -> ex.CharExponent:
    raw = parse_params(body, sep=";" if ";" in body else ",")
    allowed = {"q", "a", "sigma", "density", "tail_plus", "tail_minus", "barrier"}
    unknown = set(raw) - allowed
    if unknown:
        raise SpecError(f"unknown quadruplet field(s): {', '.join(sorted(unknown))}")
    q = safe_eval(raw.get("q", "0"))
    a = safe_eval(raw.get("a", "0"))
    sigma = safe_eval(raw.get("sigma", "0"))
    barrier = safe_eval(raw.get("barrier", "inf"))
    if q < 0 or sigma < 0:
        raise SpecError("q and sigma must be non-negative")
    params = {"q": q, "a": a, "sigma": sigma}
    if "density" not in raw:
        return ex.brownian(a, sigma, q)
    dens = compile_expr(raw["density"])

    def density(y):
        y = np.asarray(y, dtype=float)
        return np.where(y != 0, np.nan_to_num(dens(y), nan=0.0, posinf=0.0), 0.0)

    tp = compile_expr(raw["tail_plus"]) if "tail_plus" in raw else _tail_from_density(density, 1.0)
    tm = compile_expr(raw["tail_minus"]) if "tail_minus" in raw else _tail_from_density(density, -1.0)
    measure = ex.LevyMeasure(density, tp, tm, exp_barrier=barrier)
    return ex.CharExponent(
        name="quadruplet",
        killing=q,
        drift=a,
        gaussian=sigma,
        measure=measure,
        strip=(-math.inf, barrier),
        params=params,
        meta={"density": raw["density"]},
    )


def parse_exponent(spec: str) -> ex.CharExponent:
    """Build a :class:`~arcsine_levy.exponent.CharExponent` from a spec string.

    Raises
    ------
    SpecError
        For malformed specs, unknown names or parameters.
    """
    if not isinstance(spec, str) or not spec.strip():
        raise SpecError("empty exponent spec")
    name, body = _split(spec)
    try:
        if name == "quadruplet":
            return _quadruplet(body)
        params = parse_params(body)
        if name == "brownian":
            p = _numbers(params, ("a",), {"sigma": 1.0, "q": 0.0})
            return ex.brownian(p["a"], p["sigma"], p["q"])
        if name in ("lamperti", "lamperti_stable"):
            p = _numbers(params, ("alpha", "rho"))
            return ex.lamperti_stable(p["alpha"], p["rho"])
        if name in ("spos", "spectrally_positive"):
            p = _numbers(params, ("alpha",))
            return ex.spectrally_positive(p["alpha"])
        if name in ("tstable", "tilted_stable"):
            p = _numbers(params, ("alpha", "rho"))
            return ex.tilted_stable(p["alpha"], p["rho"])
    except ex.ExponentError as exc:
        raise SpecError(str(exc)) from exc
    raise SpecError(f"unknown exponent {name!r}; known: brownian, lamperti, spos, tstable, quadruplet")


def parse_closed_form(spec: str):
    """``name:key=value,...`` into ``(name, params)`` for the Mellin registry."""
    name, body = _split(spec)
    raw = parse_params(body)
    return name, {k: safe_eval(v) for k, v in raw.items()}


# ---------------------------------------------------------------- experiment config

IDENTITIES = ["main-theorem", "doney", "self-reciprocal", "cor-s2", "mellin-product", "frechet", "pareto-gamma", "arcsine-link"]

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["identity"],
    "properties": {
        "identity": {"enum": IDENTITIES},
        "exponent": {"type": "string"},
        "method": {"enum": ["paths", "oracle", "direct"]},
        "alpha": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 2},
        "rho": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "a": {"type": "number", "exclusiveMinimum": 0},
        "b": {"type": "number", "exclusiveMinimum": 0},
        "n": {"type": "integer", "minimum": 100},
        "nsteps": {"type": "integer", "minimum": 2},
        "seed": {"type": "integer", "minimum": 0},
        "dt": {"type": "number", "exclusiveMinimum": 0},
        "stop_epsilon": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "max_steps": {"type": "integer", "minimum": 1},
        "epsilon": {"type": "number", "exclusiveMinimum": 0},
        "printed": {"type": "boolean"},
        "workers": {"type": "integer", "minimum": 1},
        "output": {"type": "string"},
        "cache": {"type": "boolean"},
    },
}

_INT_KEYS = {k for k, v in CONFIG_SCHEMA["properties"].items() if v.get("type") == "integer"}
_NUM_KEYS = {k for k, v in CONFIG_SCHEMA["properties"].items() if v.get("type") == "number"}
_BOOL_KEYS = {k for k, v in CONFIG_SCHEMA["properties"].items() if v.get("type") == "boolean"}


def _coerce(key: str, value: str):
    value = value.strip()
    if key in _INT_KEYS:
        v = safe_eval(value)
        if v != int(v):
            raise SpecError(f"{key} must be an integer, got {value!r}")
        return int(v)
    if key in _NUM_KEYS:
        return safe_eval(value)
    if key in _BOOL_KEYS:
        if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
            raise SpecError(f"{key} must be a boolean, got {value!r}")
        return value.lower() in ("true", "1", "yes")
    return value


def validate_config(cfg: dict) -> dict:
    import jsonschema

    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.path) or "config"
        raise SpecError(f"{where}: {exc.message}") from None
    return cfg


def load_config(path) -> list:
    """Read an experiment file; returns the list of validated run configs (grid expanded)."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"{path}: {exc}") from None
        return [validate_config(data)]
    grid = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecError(f"{path}:{lineno}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        if k not in CONFIG_SCHEMA["properties"]:
            raise SpecError(f"{path}:{lineno}: unknown key {k!r}")
        grid[k] = [_coerce(k, part) for part in v.split("|")]
    return [validate_config(c) for c in expand_grid(grid)]


def expand_grid(grid: dict) -> list:
    """Cartesian product of ``{key: [values]}`` as a list of dicts (keys in insertion order)."""
    keys = list(grid)
    return [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]
