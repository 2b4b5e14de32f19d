import math
from pathlib import Path

import pytest

from funcsolve.config import dump_config, load_config, parse_config
from funcsolve.errors import ConfigError
from funcsolve.families import Exponential, Polynomial, Rational, make_family

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

MINIMAL = """
[geometry]
left = gamma1
right = gamma2
bottom = gamma3
top = gamma3

[boundary]
u1 = 0
u2 = 1
w1 = 0
w2 = 1

[coefficients]
a = constant
b = same
"""


def test_defaults():
    cfg = parse_config(MINIMAL)
    assert (cfg.nx, cfg.ny, cfg.n_ode) == (64, 64, 1024)
    assert cfg.tolerances.tol_endpoint is None
    assert cfg.tolerances.max_residual == math.inf
    p = cfg.problem()
    assert p.coeffs.a is p.coeffs.b and not p.degenerate


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.ini")), ids=lambda p: p.stem)
def test_round_trip_shipped_configs(path):
    cfg = load_config(path)
    again = parse_config(dump_config(cfg), base_dir=path.parent)
    assert again == cfg
    assert dump_config(again) == dump_config(cfg)


def test_round_trip_exotic_values():
    text = MINIMAL.replace("b = same", "b = rational\nb.p10 = 0.1\nb.q02 = 0.30000000000000004\nlipschitz_hint = 2.5")
    text += "\n[tolerance]\ntol_endpoint = 1e-11\nmax_residual = 0.125\n"
    cfg = parse_config(text)
    assert isinstance(cfg.b, Rational) and cfg.b.q02 == 0.30000000000000004
    assert parse_config(dump_config(cfg)) == cfg


def test_degenerate_flag_follows_data():
    cfg = parse_config(MINIMAL.replace("w2 = 1", "w2 = 0"))
    assert cfg.problem().degenerate


def test_lshape_segments():
    cfg = load_config(CONFIGS / "lshape.ini")
    spec = cfg.grid_spec(1)
    assert spec.shape == "lshape" and spec.nx == 2 * cfg.nx
    assert cfg.n_ode_at(2) == cfg.n_ode * 16


@pytest.mark.parametrize(
    "mutate, match",
    [
        (lambda t: t.replace("[boundary]", "[boundry]"), "section"),
        (lambda t: t.replace("u2 = 1", "u2 = one"), "not a number"),
        (lambda t: t.replace("a = constant", "a = spline"), "unknown coefficient family"),
        (lambda t: t.replace("b = same", "b = exponential\nb.cz = 1"), "unknown parameter"),
        (lambda t: t.replace("a = constant", "a = same"), "cannot be"),
        (lambda t: t.replace("top = gamma3", "top = gamma4"), "gamma4"),
        (lambda t: t.replace("top = gamma3", "middle = gamma3"), "unknown key"),
        (lambda t: t.replace("w1 = 0\n", ""), "w1"),
        (lambda t: "not an ini file", "parse"),
    ],
)
def test_parse_errors(mutate, match):
    with pytest.raises(ConfigError, match=match):
        parse_config(mutate(MINIMAL))


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.ini")


def test_output_paths_relative_to_config(tmp_path):
    (tmp_path / "c.ini").write_text(MINIMAL + "\n[output]\ndirectory = res\n")
    cfg = load_config(tmp_path / "c.ini")
    assert cfg.output_path("summary") == tmp_path / "res" / "summary.txt"
    assert cfg.with_output_dir("/elsewhere").output_path("fields") == Path("/elsewhere/fields.csv")


def test_families_evaluate():
    assert Polynomial(c00=1, c20=1, c02=1)(2.0, 3.0) == 14.0
    assert Exponential(scale=2, cu=1, cw=-1)(1.0, 1.0) == 2.0
    assert Rational(p00=1, q10=1)(1.0, 5.0) == 0.5
    assert make_family("Constant", {"value": "3"})(0.0, 0.0) == 3.0
