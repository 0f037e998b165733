"""Command-line interface.

Subcommands
-----------
``verify``    run an identity check, write JSON and CSV reports
``exponent``  inspect, classify or tilt a characteristic exponent
``mellin``    evaluate, invert or verify a registered Mellin transform
``cache``     list, inspect or clear the sample cache

Exit codes: 0 success / pass, 1 failed verdict or check, 2 usage or
configuration error, 3 simulation or numerical error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import config as cfgmod
from . import exponent as ex
from . import laws
from . import mellin as mel
from . import rng
from . import simulate as sim
from . import special
from .stats import SampleSizeError
from . import verify as ver

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_SIM = 0, 1, 2, 3

__all__ = ["main", "build_parser", "run_config"]


class UsageError(Exception):
    pass


def _grid_arg(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected a:b:n, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b:n, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("n must be positive")
    return np.linspace(a, b, n)


def _complex_arg(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _num(x) -> str:
    return "%.17g" % x


def _cnum(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return _num(z.real)
    return f"{_num(z.real)}{'+' if z.imag >= 0 else '-'}{_num(abs(z.imag))}j"


def _emit_json(obj) -> None:
    print(json.dumps(ver._canon(obj), sort_keys=True, indent=1))


# ---------------------------------------------------------------- verify


_NEEDS = {
    "main-theorem": ("exponent",),
    "doney": ("alpha", "rho"),
    "self-reciprocal": (),
    "cor-s2": ("alpha", "rho"),
    "mellin-product": ("alpha", "rho"),
    "frechet": ("alpha",),
    "pareto-gamma": ("a", "b"),
    "arcsine-link": ("rho",),
}


def run_config(c: dict, workers: int) -> ver.IdentityReport:
    """Run one validated experiment config."""
    ident = c["identity"]
    missing = [k for k in _NEEDS[ident] if k not in c]
    if missing:
        raise UsageError(f"identity {ident} requires --{', --'.join(missing)}")
    seed = c.get("seed", 0)
    cache = True if c.get("cache") else None
    pc = sim.PathConfig(
        dt=c.get("dt", 1e-3),
        stop_epsilon=c.get("stop_epsilon", 1e-6),
        max_steps=c.get("max_steps", 20_000_000),
    )
    eps = c.get("epsilon", 1e-3)
    if ident == "main-theorem":
        psi = cfgmod.parse_exponent(c["exponent"])
        return ver.check_main_theorem(psi, c.get("method", "paths"), c.get("n", 10_000), seed, pc, eps, workers, cache=cache)
    if ident == "doney":
        return ver.check_doney(c["alpha"], c["rho"], c.get("nsteps", 1 << 15), c.get("n", 20_000), seed, workers, cache=cache)
    if ident == "self-reciprocal":
        psi = cfgmod.parse_exponent(c["exponent"]) if "exponent" in c else None
        method = c.get("method", "direct" if psi is None else "paths")
        return ver.check_self_reciprocal(psi, method, c.get("n", 100_000), seed, pc, eps, workers, cache=cache)
    if ident == "cor-s2":
        return ver.check_cor_s2(c["alpha"], c["rho"], c.get("n", 100_000), seed)
    if ident == "mellin-product":
        return ver.check_mellin_product(c["alpha"], c["rho"], printed=c.get("printed", False))
    if ident == "frechet":
        return ver.check_frechet(c["alpha"], c.get("n", 10_000), seed, pc, eps, workers, cache=cache)
    if ident == "pareto-gamma":
        return ver.check_pareto_gamma(c["a"], c["b"], c.get("n", 100_000), seed)
    return ver.check_arcsine_link(c["rho"], c.get("n", 100_000), seed)


def _verify_configs(args) -> list:
    if args.config:
        if args.identity:
            raise UsageError("use either --config or --identity")
        return cfgmod.load_config(args.config)
    if not args.identity:
        raise UsageError("one of --identity or --config is required")
    c = {"identity": args.identity}
    for key in ("exponent", "method", "alpha", "rho", "a", "b", "n", "nsteps", "seed", "dt", "stop_epsilon", "max_steps", "epsilon"):
        v = getattr(args, key)
        if v is not None:
            c[key] = v
    if args.printed:
        c["printed"] = True
    if args.cache:
        c["cache"] = True
    return [cfgmod.validate_config(c)]


def cmd_verify(args) -> int:
    configs = _verify_configs(args)
    reports = []
    for c in configs:
        # command-line options win over the experiment file
        rep = run_config(c, args.workers or c.get("workers") or rng.default_workers())
        reports.append(rep)
        print(rep.summary())
    out = Path(args.output or configs[0].get("output", "report"))
    out.parent.mkdir(parents=True, exist_ok=True)
    payload = reports[0] if len(reports) == 1 else reports
    Path(str(out) + ".json").write_text(ver.to_json(payload))
    Path(str(out) + ".csv").write_text(ver.to_csv(reports), newline="")
    print(f"wrote {out}.json and {out}.csv")
    return EXIT_OK if all(r.verdict == ver.PASS for r in reports) else EXIT_FAIL


# ---------------------------------------------------------------- exponent


def _psi_values(psi, zs):
    out = []
    for z in zs:
        try:
            v = complex(ex.evaluate(psi, z))
        except (ex.StripError, ex.QuadratureError) as exc:
            out.append({"z": _cnum(z), "error": str(exc)})
            continue
        out.append({"z": _cnum(z), "psi": _cnum(v)})
    return out


def _points(args, default):
    pts = list(args.z or [])
    if args.grid is not None:
        pts += [complex(x) for x in args.grid]
    return pts or default


def cmd_exponent(args) -> int:
    psi = cfgmod.parse_exponent(args.spec)
    beta = args.beta
    if args.action == "inspect":
        root = ex.find_rho(psi)
        info = {
            "exponent": psi.describe(),
            "killing": psi.killing,
            "drift": psi.drift,
            "gaussian": psi.gaussian,
            "strip": list(psi.strip),
            "rho": root.rho,
            "derivativeAtZeroPlus": root.derivative_at_zero_plus,
            "values": _psi_values(psi, _points(args, [0.25, 0.5, 0.5 + 1j])),
        }
        if args.json:
            _emit_json(info)
        else:
            print(f"{info['exponent']}  strip={tuple(psi.strip)}  q={psi.killing:g} a={psi.drift:.12g} sigma={psi.gaussian:g}")
            print(f"rho = {root.rho:.15g}   Psi'(0+) = {root.derivative_at_zero_plus:.12g}")
            for row in info["values"]:
                print(f"  Psi({row['z']}) = {row.get('psi', row.get('error'))}")
        return EXIT_OK
    if args.action == "classify":
        flags = ex.classify(psi, beta)
        d = flags.as_dict()
        if args.json:
            _emit_json({"exponent": psi.describe(), **d})
        else:
            print(f"{psi.describe()}  beta={beta:g}")
            for k in ("inN", "inNbeta", "inNbetaRho", "rho", "rhoBelowBeta", "derivativeAtZeroPlus", "killing", "tailCheck", "tailDirection", "limitUPsi"):
                print(f"  {k:22s} {d[k]}")
            for n in d["notes"]:
                print(f"  note: {n}")
        return EXIT_OK
    # tilt
    try:
        t = ex.tilt(psi, beta)
    except ex.InadmissibleTiltError as exc:
        print(f"inadmissible tilt: {exc}", file=sys.stderr)
        return EXIT_FAIL
    out = ex.dual(t) if args.dual else t
    root = ex.find_rho(out)
    nd = ex.check_negative_definite(out, trials=100)
    info = {
        "exponent": out.describe(),
        "beta": beta,
        "qBeta": t.meta.get("q_beta"),
        "killing": out.killing,
        "drift": out.drift,
        "strip": list(out.strip),
        "rho": root.rho,
        "negativeDefinite": bool(nd),
        "values": _psi_values(out, _points(args, [0.25, 0.5, 0.5 + 1j])),
    }
    compare = args.compare
    if compare is None and args.dual and psi.name == "lamperti":
        p = psi.params
        compare = f"lamperti:alpha={p['alpha']!r},rho={1 - p['rho']!r}"
    if compare:
        other = cfgmod.parse_exponent(compare)
        tt = np.linspace(-3, 3, 10)
        re = np.linspace(max(out.strip[0], other.strip[0], -2.0) + 0.05, min(out.strip[1], other.strip[1], 2.0) - 0.05, 5)
        z = (re[:, None] + 1j * tt[None, :]).ravel()
        a = np.asarray(ex.evaluate(out, z))
        b = np.asarray(ex.evaluate(other, z))
        dev = float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))
        info["compare"] = {"with": other.describe(), "maxDeviation": dev, "match": dev <= 1e-10}
    if args.json:
        _emit_json(info)
    else:
        kind = "dual tilt" if args.dual else "tilt"
        print(f"{kind} by beta={beta:g}: {out.describe()}")
        print(f"  q_beta = {info['qBeta']:.12g}  killing = {out.killing:.12g}  drift = {out.drift:.12g}  strip = {tuple(out.strip)}")
        print(f"  rho = {root.rho:.15g}  negative-definite: {bool(nd)}")
        for row in info["values"]:
            print(f"  Psi({row['z']}) = {row.get('psi', row.get('error'))}")
        if "compare" in info:
            c = info["compare"]
            print(f"  {'match' if c['match'] else 'MISMATCH'} with {c['with']} (max deviation {c['maxDeviation']:.3e})")
    if "compare" in info and not info["compare"]["match"]:
        return EXIT_FAIL
    return EXIT_OK if nd else EXIT_FAIL


# ---------------------------------------------------------------- mellin


def _closed(spec):
    name, params = cfgmod.parse_closed_form(spec)
    try:
        return name, params, mel.closed_form(name, **params)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None


def _default_recurrence_grid(m):
    lo, hi = m.strip
    lo = lo if math.isfinite(lo) else (hi - 2.0 if math.isfinite(hi) else -1.0)
    hi = hi if math.isfinite(hi) else lo + 2.0
    width = min(hi - lo, 1.0)
    re = lo + width * (np.arange(1, 11) / 11.0)
    im = np.linspace(-3.0, 3.0, 10)
    return (re[:, None] + 1j * im[None, :]).ravel()


def cmd_mellin(args) -> int:
    if args.action == "verify-recurrence":
        spec = args.closed_form or args.spec
        if not spec:
            raise UsageError("verify-recurrence needs --closed-form NAME:params")
        name, params, (m, rec) = _closed(spec)
        if rec is None:
            raise UsageError(f"{name} has no registered recurrence")
        grid = _default_recurrence_grid(m)
        res = mel.verify_recurrence(m, rec, grid)
        ok = res <= args.tol
        if args.json:
            _emit_json({"closedForm": m.describe(), "residual": res, "gridPoints": int(grid.size), "tolerance": args.tol, "pass": ok})
        else:
            print(f"{m.describe()}: recurrence residual {res:.3e} on {grid.size} points ({'ok' if ok else 'FAIL'} at {args.tol:g})")
        return EXIT_OK if ok else EXIT_FAIL
    if not args.spec:
        raise UsageError(f"mellin {args.action} needs a closed form NAME:params")
    name, params, (m, _) = _closed(args.spec)
    if args.action == "eval":
        zs = args.z or [1.0]
        rows = []
        for z in zs:
            v = m(z) if m.in_strip(z) else m.continued(z)
            rows.append({"z": _cnum(z), "value": _cnum(v), "inStrip": bool(m.in_strip(z))})
        if args.json:
            _emit_json({"closedForm": m.describe(), "strip": list(m.strip), "values": rows})
        else:
            for r in rows:
                note = "" if r["inStrip"] else "  (continuation)"
                print(f"M({r['z']}) = {r['value']}{note}")
        return EXIT_OK
    # invert
    if args.xgrid is None:
        raise UsageError("invert needs --xgrid a:b:n")
    try:
        law = laws.law_from_spec(name, **params)
    except KeyError:
        law = None
    w = csv.writer(sys.stdout, lineterminator="\r\n")
    header = ["x", "density"] + (["closed_density", "abs_error"] if law is not None and law.pdf is not None else [])
    w.writerow(header)
    for x in args.xgrid:
        f = mel.invert_to_density(m, args.c, float(x))
        row = [_num(x), _num(f)]
        if len(header) > 2:
            g = float(law.pdf(np.array([x]))[0])
            row += [_num(g), _num(abs(f - g))]
        w.writerow(row)
    return EXIT_OK


# ---------------------------------------------------------------- cache


def cmd_cache(args) -> int:
    d = Path(args.dir) if args.dir else sim.cache_dir()
    files = sorted(d.glob("*.bin")) if d.exists() else []
    if args.action == "path":
        print(d)
    elif args.action == "list":
        for f in files:
            try:
                _, head = sim.read_samples(f)
                print(f"{f.name}  count={head['count']} seed={head['seed']}")
            except sim.SimulationError as exc:
                print(f"{f.name}  unreadable: {exc}")
        print(f"{len(files)} file(s) in {d}")
    elif args.action == "clear":
        for f in files:
            f.unlink()
            side = Path(str(f) + ".json")
            if side.exists():
                side.unlink()
        print(f"removed {len(files)} file(s) from {d}")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arcsine-levy", description="Arc-sine and Pareto factorizations of exponential functionals of Levy processes.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run an identity check and write JSON/CSV reports")
    v.add_argument("--identity", choices=cfgmod.IDENTITIES)
    v.add_argument("--config", help="experiment file (key = value lines or JSON)")
    v.add_argument("--exponent", help="exponent spec, e.g. brownian:a=-0.25,sigma=1")
    v.add_argument("--method", choices=["paths", "oracle", "direct"])
    v.add_argument("--alpha", type=float)
    v.add_argument("--rho", type=float)
    v.add_argument("--a", type=float, help="gamma shape of the denominator (pareto-gamma)")
    v.add_argument("--b", type=float, help="gamma shape of the numerator (pareto-gamma)")
    v.add_argument("--n", type=int)
    v.add_argument("--nsteps", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--dt", type=float)
    v.add_argument("--stop-epsilon", dest="stop_epsilon", type=float)
    v.add_argument("--max-steps", dest="max_steps", type=int)
    v.add_argument("--epsilon", type=float, help="small-jump cutoff of the compound Poisson approximation")
    v.add_argument("--printed", action="store_true", help="mellin-product: use the transform with the extra alpha factor")
    v.add_argument("--cache", action="store_true", help="reuse simulated samples from the cache directory")
    v.add_argument("--workers", type=int, help="worker processes (default: available CPUs)")
    v.add_argument("--output", help="output path prefix (writes PREFIX.json and PREFIX.csv; default: report)")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("exponent", help="inspect, classify or tilt an exponent")
    e.add_argument("action", choices=["inspect", "classify", "tilt"])
    e.add_argument("spec", help="exponent spec, e.g. lamperti:alpha=0.8,rho=0.4")
    e.add_argument("--beta", type=float, default=1.0)
    e.add_argument("--dual", action="store_true", help="tilt: report the dual of the tilted exponent")
    e.add_argument("--compare", help="tilt: exponent spec to compare the result with")
    e.add_argument("--z", type=_complex_arg, action="append", help="evaluation point (repeatable)")
    e.add_argument("--grid", type=_grid_arg, help="real evaluation grid a:b:n")
    e.add_argument("--json", action="store_true")
    e.set_defaults(func=cmd_exponent)

    m = sub.add_parser("mellin", help="evaluate, invert or verify registered Mellin transforms")
    m.add_argument("action", choices=["eval", "invert", "verify-recurrence"])
    m.add_argument("spec", nargs="?", help=f"closed form NAME:params; names: {', '.join(sorted(mel.REGISTRY))}")
    m.add_argument("--closed-form", dest="closed_form")
    m.add_argument("--z", type=_complex_arg, action="append")
    m.add_argument("--xgrid", type=_grid_arg)
    m.add_argument("--c", type=float, help="abscissa of the inversion contour")
    m.add_argument("--tol", type=float, default=1e-10)
    m.add_argument("--json", action="store_true")
    m.set_defaults(func=cmd_mellin)

    c = sub.add_parser("cache", help=f"manage the sample cache (directory from ${sim.CACHE_ENV})")
    c.add_argument("action", choices=["list", "clear", "path"])
    c.add_argument("--dir")
    c.set_defaults(func=cmd_cache)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, cfgmod.SpecError, ver.PreconditionError) as exc:
        sub = {"verify": "verify", "exponent": "exponent", "mellin": "mellin", "cache": "cache"}[args.command]
        print(f"arcsine-levy {sub}: error: {exc}", file=sys.stderr)
        print(f"usage: see `arcsine-levy {sub} --help`", file=sys.stderr)
        return EXIT_CONFIG
    except (sim.SimulationError, ex.ExponentError, mel.MellinError, special.PoleError, special.DomainError, SampleSizeError, ArithmeticError, laws.ESSCollapseError) as exc:
        print(f"arcsine-levy: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SIM


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
