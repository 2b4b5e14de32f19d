"""Declarative solver configuration (INI-style flat sections).

Example::

    [geometry]
    shape = rectangle
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
    a = polynomial
    a.c00 = 1
    a.c20 = 1
    a.c02 = 1
    b = same

    [resolution]
    nx = 64
    ny = 64
    n_ode = 1024

    [output]
    directory = out
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .core_types import CoefficientPair, GridSpec, ProblemData, Tag
from .errors import ConfigError
from .families import family_params, make_family

SECTIONS = ("geometry", "boundary", "coefficients", "resolution", "tolerance", "output")


@dataclass(frozen=True)
class Tolerances:
    tol_endpoint: float | None = None  # None: 1e-12 * max(1, |u2 - u1|)
    tol_linear: float = 1e-10
    tol_picard: float = 1e-8
    picard_max_iter: int = 500
    picard_damping: float = 1.0
    verify_threshold: float = 5e-3
    max_residual: float = math.inf


@dataclass(frozen=True)
class Outputs:
    directory: str = "."
    fields: str = "fields.csv"
    profile: str = "profile.csv"
    summary: str = "summary.txt"
    convergence: str = "convergence.csv"


@dataclass(frozen=True)
class SolverConfig:
    shape: str
    tags: dict
    boundary: tuple[float, float, float, float]  # (u1, u2, w1, w2)
    a: object
    b: object  # a family instance, or the string "same"
    nx: int = 64
    ny: int = 64
    n_ode: int = 1024
    samples_per_axis: int = 33
    ode_refinement: int = 4
    lx: float = 1.0
    ly: float = 1.0
    lipschitz_hint: float | None = None
    tolerances: Tolerances = field(default_factory=Tolerances)
    outputs: Outputs = field(default_factory=Outputs)
    base_dir: str = field(default=".", compare=False)

    def grid_spec(self, refine: int = 0) -> GridSpec:
        f = 2**refine
        return GridSpec(self.nx * f, self.ny * f, self.tags, self.shape, self.lx, self.ly)

    def n_ode_at(self, refine: int = 0) -> int:
        return self.n_ode * self.ode_refinement**refine

    def problem(self) -> ProblemData:
        u1, u2, w1, w2 = self.boundary
        b = self.a if self.b == "same" else self.b
        coeffs = CoefficientPair(self.a, b, self.lipschitz_hint)
        return ProblemData(w1, w2, u1, u2, coeffs, degenerate=(w1 == w2))

    def output_path(self, name: str) -> Path:
        p = Path(self.outputs.directory)
        if not p.is_absolute():
            p = Path(self.base_dir) / p
        return p / getattr(self.outputs, name)

    def with_output_dir(self, directory: str) -> "SolverConfig":
        return replace(self, outputs=replace(self.outputs, directory=str(directory)))


def _float(section, key, default=None):
    try:
        raw = section.get(key)
        if raw is None:
            if default is None:
                raise ConfigError(f"[{section.name}] missing required key {key!r}")
            return default
        return float(raw)
    except ValueError:
        raise ConfigError(f"[{section.name}] {key} = {raw!r} is not a number") from None


def _int(section, key, default):
    raw = section.get(key)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"[{section.name}] {key} = {raw!r} is not an integer") from None


def _family(section, which):
    name = section.get(which)
    if name is None:
        raise ConfigError(f"[coefficients] missing {which!r}")
    if name.strip().lower() == "same":
        if which == "a":
            raise ConfigError("[coefficients] a cannot be 'same'")
        return "same"
    prefix = which + "."
    params = {k[len(prefix):]: v for k, v in section.items() if k.startswith(prefix)}
    return make_family(name, params)


def parse_config(text: str, base_dir: str | Path = ".") -> SolverConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), default_section="__none__")
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None
    unknown = set(cp.sections()) - set(SECTIONS)
    if unknown:
        raise ConfigError(f"unknown section(s) {sorted(unknown)}")
    for name in ("geometry", "boundary", "coefficients"):
        if not cp.has_section(name):
            raise ConfigError(f"missing section [{name}]")
    for name in SECTIONS:
        if not cp.has_section(name):
            cp.add_section(name)

    geo = cp["geometry"]
    shape = geo.get("shape", "rectangle").strip().lower()
    segments = GridSpec.SEGMENTS.get(shape)
    if segments is None:
        raise ConfigError(f"unknown shape {shape!r}")
    try:
        tags = {s: Tag.parse(geo[s]) for s in segments if s in geo}
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    extra = set(geo) - set(segments) - {"shape", "lx", "ly"}
    if extra:
        raise ConfigError(f"[geometry] unknown key(s) {sorted(extra)}")

    bd = cp["boundary"]
    boundary = tuple(_float(bd, k) for k in ("u1", "u2", "w1", "w2"))

    co = cp["coefficients"]
    hint = co.get("lipschitz_hint")
    res = cp["resolution"]
    tol = cp["tolerance"]
    te = tol.get("tol_endpoint", "auto").strip().lower()
    out = cp["output"]
    defaults = Outputs()
    try:
        return SolverConfig(
            shape=shape,
            tags=tags,
            boundary=boundary,
            a=_family(co, "a"),
            b=_family(co, "b"),
            nx=_int(res, "nx", 64),
            ny=_int(res, "ny", 64),
            n_ode=_int(res, "n_ode", 1024),
            samples_per_axis=_int(res, "samples_per_axis", 33),
            ode_refinement=_int(res, "ode_refinement", 4),
            lx=_float(geo, "lx", 1.0),
            ly=_float(geo, "ly", 1.0),
            lipschitz_hint=None if hint is None else float(hint),
            tolerances=Tolerances(
                tol_endpoint=None if te == "auto" else float(te),
                tol_linear=_float(tol, "tol_linear", 1e-10),
                tol_picard=_float(tol, "tol_picard", 1e-8),
                picard_max_iter=_int(tol, "picard_max_iter", 500),
                picard_damping=_float(tol, "picard_damping", 1.0),
                verify_threshold=_float(tol, "verify_threshold", 5e-3),
                max_residual=_float(tol, "max_residual", math.inf),
            ),
            outputs=Outputs(**{k: out.get(k, getattr(defaults, k)) for k in defaults.__dataclass_fields__}),
            base_dir=str(base_dir),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def load_config(path: str | Path) -> SolverConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_config(text, base_dir=path.parent)


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def dump_config(cfg: SolverConfig) -> str:
    """Serialize ``cfg`` so that ``parse_config(dump_config(cfg)) == cfg``."""
    lines = ["[geometry]", f"shape = {cfg.shape}", f"lx = {_fmt(cfg.lx)}", f"ly = {_fmt(cfg.ly)}"]
    lines += [f"{seg} = {tag.value}" for seg, tag in cfg.tags.items()]
    u1, u2, w1, w2 = cfg.boundary
    lines += ["", "[boundary]", f"u1 = {_fmt(u1)}", f"u2 = {_fmt(u2)}", f"w1 = {_fmt(w1)}", f"w2 = {_fmt(w2)}"]
    lines += ["", "[coefficients]"]
    for which, fam in (("a", cfg.a), ("b", cfg.b)):
        if fam == "same":
            lines.append(f"{which} = same")
            continue
        lines.append(f"{which} = {fam.name}")
        lines += [f"{which}.{k} = {_fmt(v)}" for k, v in family_params(fam).items()]
    if cfg.lipschitz_hint is not None:
        lines.append(f"lipschitz_hint = {_fmt(cfg.lipschitz_hint)}")
    lines += [
        "",
        "[resolution]",
        f"nx = {cfg.nx}",
        f"ny = {cfg.ny}",
        f"n_ode = {cfg.n_ode}",
        f"samples_per_axis = {cfg.samples_per_axis}",
        f"ode_refinement = {cfg.ode_refinement}",
    ]
    t = cfg.tolerances
    lines += ["", "[tolerance]", f"tol_endpoint = {'auto' if t.tol_endpoint is None else _fmt(t.tol_endpoint)}"]
    for k in ("tol_linear", "tol_picard", "picard_max_iter", "picard_damping", "verify_threshold", "max_residual"):
        lines.append(f"{k} = {_fmt(getattr(t, k))}")
    lines += ["", "[output]"]
    lines += [f"{k} = {getattr(cfg.outputs, k)}" for k in cfg.outputs.__dataclass_fields__]
    return "\n".join(lines) + "\n"
