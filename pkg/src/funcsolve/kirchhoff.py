"""Kirchhoff-type transforms along the solved profile ``U``.

    theta(w) = ∫_{w1}^{w} a(U(t), t) U'(t) dt,      psi(w) = ∫_{w1}^{w} b(U(t), t) dt

Both are tabulated by the composite trapezoid rule on the ODE grid. Since
``a U' = gamma b`` along a solution, ``theta = gamma psi`` and
``gamma = theta(w2) / psi(w2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core_types import CoefficientPair, evaluate
from .errors import ConsistencyViolation, NonPositiveIntegrand, NotInvertible, OutOfRange
from .zwirner_ode import TwoPointSolution

INVERT_SLACK = 1e-12


def cumulative_trapezoid(f: np.ndarray, x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(f, dtype=float)
    out[1:] = np.cumsum(0.5 * (f[1:] + f[:-1]) * np.diff(x))
    return out


@dataclass(frozen=True, eq=False)
class MonotoneTransform:
    """A tabulated strictly monotone function and its (lazy) inverse."""

    nodes: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    kind: str = "psi"

    def __post_init__(self):
        for name in ("nodes", "values"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.nodes.shape != self.values.shape or self.nodes.ndim != 1:
            raise ValueError("nodes and values must be 1-D arrays of equal length")

    @property
    def end(self) -> float:
        """Value at the last node (``t(w2)``)."""
        return float(self.values[-1])

    @property
    def direction(self) -> int:
        """+1 strictly increasing, -1 strictly decreasing, 0 otherwise."""
        d = np.diff(self.values)
        if d.size and np.all(d > 0):
            return 1
        if d.size and np.all(d < 0):
            return -1
        return 0

    def __call__(self, w) -> np.ndarray:
        return np.interp(w, self.nodes, self.values)

    def to_table(self) -> str:
        rows = "\n".join(f"{x:.17g},{v:.17g}" for x, v in zip(self.nodes, self.values))
        return f"w,{self.kind}\n{rows}\n"


def build_psi(sol: TwoPointSolution, coeffs: CoefficientPair) -> MonotoneTransform:
    b = evaluate(coeffs.b, sol.u_values, sol.w_nodes)
    if not np.all(b > 0):
        k = int(np.flatnonzero(~(b > 0))[0])
        raise NonPositiveIntegrand(
            f"b(U, w) = {b[k]:.6g} <= 0 at w = {sol.w_nodes[k]:.6g} on the solved profile"
        )
    return MonotoneTransform(sol.w_nodes, cumulative_trapezoid(b, sol.w_nodes), "psi")


def build_theta(sol: TwoPointSolution, coeffs: CoefficientPair) -> MonotoneTransform:
    a = evaluate(coeffs.a, sol.u_values, sol.w_nodes)
    return MonotoneTransform(
        sol.w_nodes, cumulative_trapezoid(a * sol.derivative_values, sol.w_nodes), "theta"
    )


def gamma_ratio(
    theta: MonotoneTransform,
    psi: MonotoneTransform,
    gamma_shooting: float | None = None,
    rtol: float = 1e-6,
) -> float:
    """``theta(w2) / psi(w2)``, optionally cross-checked against the shooting gamma.

    A mismatch beyond ``rtol`` raises :class:`ConsistencyViolation`: both numbers
    approximate the same constant, so disagreement means a quadrature or
    integrator defect.
    """
    if not psi.end > 0:
        raise ValueError("psi(w2) must be positive")
    ratio = theta.end / psi.end
    if gamma_shooting is not None:
        scale = max(abs(gamma_shooting), abs(ratio))
        if abs(ratio - gamma_shooting) > rtol * scale:
            raise ConsistencyViolation(
                f"theta(w2)/psi(w2) = {ratio!r} disagrees with shooting gamma {gamma_shooting!r}"
            )
    return ratio


def invert(t: MonotoneTransform, value):
    """``w`` with ``t(w) = value``: binary search over the nodes, then linear
    interpolation in the bracketing interval. Node values map back to nodes
    exactly. Accepts scalars or arrays.
    """
    direction = t.direction
    if direction == 0:
        raise NotInvertible(f"{t.kind} is not strictly monotone")
    vals = t.values if direction > 0 else -t.values
    v = np.asarray(value, dtype=float) * direction
    lo, hi = vals[0], vals[-1]
    if np.any(v < lo - INVERT_SLACK) or np.any(v > hi + INVERT_SLACK) or np.any(np.isnan(v)):
        raise OutOfRange(
            f"value(s) outside the range [{min(t.values[0], t.values[-1])!r}, "
            f"{max(t.values[0], t.values[-1])!r}] of {t.kind}"
        )
    v = np.clip(v, lo, hi)
    k = np.searchsorted(vals, v, side="right") - 1
    k = np.clip(k, 0, vals.size - 2)
    s = (v - vals[k]) / (vals[k + 1] - vals[k])
    w = (1.0 - s) * t.nodes[k] + s * t.nodes[k + 1]
    return float(w) if np.ndim(w) == 0 else w
