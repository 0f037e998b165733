import json
import math

import numpy as np
import pytest

from arcsine_levy import config as C, exponent as ex


def test_safe_eval():
    assert C.safe_eval("1/3") == pytest.approx(1 / 3)
    assert C.safe_eval("2*pi") == pytest.approx(2 * math.pi)
    assert C.safe_eval("gamma(0.5)**2") == pytest.approx(math.pi)
    for bad in ("__import__('os')", "open('x')", "(1).real", "[1,2]", "y"):
        with pytest.raises(C.SpecError):
            C.safe_eval(bad)


def test_compile_expr_vectorized():
    f = C.compile_expr("exp(-y)*(y>0)")
    y = np.array([-1.0, 0.5, 2.0])
    assert np.allclose(f(y), [0.0, math.exp(-0.5), math.exp(-2.0)])


def test_parse_builtin_exponents():
    psi = C.parse_exponent("brownian:a=-0.25,sigma=1")
    assert abs(psi(0.5)) < 1e-15
    lam = C.parse_exponent("lamperti:alpha=0.8,rho=0.4")
    assert abs(lam(0.4)) < 1e-12
    assert C.parse_exponent("spos:alpha=0.6").describe() == "spos:alpha=0.6"
    ts = C.parse_exponent("tstable:alpha=0.6,rho=1/3")
    assert abs(ts(1 / 3)) < 1e-12


@pytest.mark.parametrize("spec", ["", "nope:a=1", "brownian", "brownian:a=x", "brownian:a=1,z=2", "lamperti:alpha=0.8", "brownian:a"])
def test_malformed_specs(spec):
    with pytest.raises(C.SpecError):
        C.parse_exponent(spec)


def test_quadruplet_matches_builtin():
    q = C.parse_exponent("quadruplet:q=0;a=-0.5;sigma=1")
    assert np.allclose(q(np.array([0.3 + 1j, -1.0])), ex.brownian(-0.5)(np.array([0.3 + 1j, -1.0])))


def test_quadruplet_with_density():
    psi = C.parse_exponent("quadruplet:q=0;a=0;sigma=0;density=exp(-y)*(y>0);barrier=1")
    z = 0.3
    ref = 1 / (1 - z) - 1 - z * (1 - 2 / math.e)
    assert abs(psi(z) - ref) < 1e-8
    # numerically integrated tail
    y = np.array([0.01, 0.5, 3.0])
    assert np.allclose(psi.measure.tail_plus(y), np.exp(-y), rtol=1e-7)
    assert np.all(psi.measure.tail_minus(y) == 0)


def test_closed_form_spec():
    assert C.parse_closed_form("lamperti-ef:alpha=0.6,rho=0.3") == ("lamperti-ef", {"alpha": 0.6, "rho": 0.3})


def test_key_value_config_with_grid(tmp_path):
    p = tmp_path / "grid.cfg"
    p.write_text("# grid\nidentity = arcsine-link\nrho = 0.25 | 0.5 | 0.75\nn = 1000\nseed = 3\n")
    runs = C.load_config(p)
    assert [r["rho"] for r in runs] == [0.25, 0.5, 0.75]
    assert all(r["n"] == 1000 and r["seed"] == 3 for r in runs)


def test_json_config(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"identity": "doney", "alpha": 1, "rho": 0.5}))
    assert C.load_config(p) == [{"identity": "doney", "alpha": 1, "rho": 0.5}]


@pytest.mark.parametrize("text", ["identity = nope\n", "identity = doney\nfoo = 1\n", "identity = doney\nn = 2.5\n", "identity = doney\nrho = 1.5\n", "just text\n"])
def test_invalid_configs(tmp_path, text):
    p = tmp_path / "bad.cfg"
    p.write_text(text)
    with pytest.raises(C.SpecError):
        C.load_config(p)


def test_expand_grid():
    assert C.expand_grid({"a": [1, 2], "b": [3]}) == [{"a": 1, "b": 3}, {"a": 2, "b": 3}]
