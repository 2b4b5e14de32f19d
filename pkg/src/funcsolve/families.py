"""Named coefficient families for declarative configs.

Every family is a frozen dataclass that evaluates on numpy arrays and knows
its own config representation (``name`` plus a flat parameter dict).
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .errors import ConfigError

POLY_KEYS = ("c00", "c10", "c01", "c20", "c11", "c02")  # c_ij multiplies u**i * w**j


def _poly(c, u, w):
    c00, c10, c01, c20, c11, c02 = c
    return c00 + c10 * u + c01 * w + c20 * u * u + c11 * u * w + c02 * w * w


@dataclass(frozen=True)
class Constant:
    name = "constant"
    value: float = 1.0

    def __call__(self, u, w):
        return self.value + 0.0 * (np.asarray(u) + np.asarray(w))


@dataclass(frozen=True)
class Polynomial:
    """``sum c_ij u^i w^j`` with ``i + j <= 2``."""

    name = "polynomial"
    c00: float = 0.0
    c10: float = 0.0
    c01: float = 0.0
    c20: float = 0.0
    c11: float = 0.0
    c02: float = 0.0

    def __call__(self, u, w):
        return _poly((self.c00, self.c10, self.c01, self.c20, self.c11, self.c02), u, w)


@dataclass(frozen=True)
class Exponential:
    """``scale * exp(cu * u + cw * w)``."""

    name = "exponential"
    scale: float = 1.0
    cu: float = 0.0
    cw: float = 0.0

    def __call__(self, u, w):
        return self.scale * np.exp(self.cu * u + self.cw * w)


@dataclass(frozen=True)
class Rational:
    """``p(u, w) / q(u, w)`` with ``p``, ``q`` quadratic polynomials (keys ``p00..p02``, ``q00..q02``)."""

    name = "rational"
    p00: float = 1.0
    p10: float = 0.0
    p01: float = 0.0
    p20: float = 0.0
    p11: float = 0.0
    p02: float = 0.0
    q00: float = 1.0
    q10: float = 0.0
    q01: float = 0.0
    q20: float = 0.0
    q11: float = 0.0
    q02: float = 0.0

    def __call__(self, u, w):
        p = _poly((self.p00, self.p10, self.p01, self.p20, self.p11, self.p02), u, w)
        q = _poly((self.q00, self.q10, self.q01, self.q20, self.q11, self.q02), u, w)
        return p / q


FAMILIES = {cls.name: cls for cls in (Constant, Polynomial, Exponential, Rational)}


def make_family(name: str, params: dict[str, float]):
    try:
        cls = FAMILIES[name.strip().lower()]
    except KeyError:
        raise ConfigError(f"unknown coefficient family {name!r}; choose from {sorted(FAMILIES)}") from None
    allowed = {f.name for f in fields(cls)}
    unknown = set(params) - allowed
    if unknown:
        raise ConfigError(f"unknown parameter(s) {sorted(unknown)} for family {cls.name!r}")
    try:
        return cls(**{k: float(v) for k, v in params.items()})
    except ValueError as exc:
        raise ConfigError(f"bad parameter value for family {cls.name!r}: {exc}") from None


def family_params(fam) -> dict[str, float]:
    return {f.name: getattr(fam, f.name) for f in fields(fam)}
