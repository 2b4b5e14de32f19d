"""Two-point problem with an unknown parameter.

Find a real ``gamma`` and a function ``U`` on ``[w1, w2]`` with

    U'(w) = gamma * F(U(w), w),   U(w1) = u1,   U(w2) = u2,   F = b / a.

The problem is solved by shooting in ``gamma``: integrate the initial-value
problem from ``w1`` with fixed-step RK4 and root-find the endpoint mismatch
``G(gamma) = U(w2; gamma) - u2``. For ``F > 0`` the map ``gamma -> U(w2)`` is
strictly increasing, and the sampled envelopes ``p <= F <= q`` give a bracket
for the root.
"""

from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .core_types import HypothesisReport, ProblemData, validate_hypotheses
from .errors import (
    BracketingFailed,
    InvalidProblem,
    MaxIterationsExceeded,
    NonFiniteTrajectory,
)

log = logging.getLogger(__name__)

CLAMP_FRACTION = 0.05
MAX_DOUBLINGS = 60
MAX_ROOT_ITERATIONS = 200


@dataclass(frozen=True)
class TwoPointProblem:
    data: ProblemData
    n_ode: int = 1024

    def __post_init__(self):
        if not self.data.w2 > self.data.w1:
            raise InvalidProblem("the two-point problem needs w2 > w1")
        if self.n_ode < 1:
            raise InvalidProblem("n_ode must be positive")

    @property
    def w_nodes(self) -> np.ndarray:
        d = self.data
        return d.w1 + (d.w2 - d.w1) * (np.arange(self.n_ode + 1) / self.n_ode)

    @property
    def clamp_bounds(self) -> tuple[float, float]:
        """U-range used when evaluating F: R inflated by 5% of its height."""
        d = self.data
        margin = CLAMP_FRACTION * (d.u_hi - d.u_lo)
        return d.u_lo - margin, d.u_hi + margin


@dataclass(frozen=True, eq=False)
class TwoPointSolution:
    gamma: float
    w_nodes: np.ndarray = field(repr=False)
    u_values: np.ndarray = field(repr=False)
    derivative_values: np.ndarray = field(repr=False)
    bracket: tuple[float, float] = (0.0, 0.0)
    iterations: int = 0
    clamped_evaluations: int = 0
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        for name in ("w_nodes", "u_values", "derivative_values"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_ode(self) -> int:
        return self.w_nodes.size - 1

    def __call__(self, w) -> np.ndarray:
        """``U`` off the nodes by linear interpolation."""
        return np.interp(w, self.w_nodes, self.u_values)

    def to_table(self, derivative: bool = True) -> str:
        buf = io.StringIO()
        buf.write(f"# gamma = {self.gamma!r}\n")
        if derivative:
            buf.write("w,U,dU\n")
            rows = np.column_stack([self.w_nodes, self.u_values, self.derivative_values])
        else:
            buf.write("w,U\n")
            rows = np.column_stack([self.w_nodes, self.u_values])
        np.savetxt(buf, rows, delimiter=",", fmt="%.17g")
        return buf.getvalue()

    @classmethod
    def from_table(cls, text: str) -> "TwoPointSolution":
        """Parse :meth:`to_table` output. Without a ``dU`` column the derivative
        is rebuilt with second-order finite differences."""
        gamma = math.nan
        lines = text.splitlines()
        body = []
        for line in lines:
            s = line.strip()
            if s.startswith("#"):
                key, _, val = s[1:].partition("=")
                if key.strip() == "gamma":
                    gamma = float(val)
            elif s and not s[0].isalpha():
                body.append(s)
        data = np.loadtxt(body, delimiter=",", ndmin=2)
        w, u = data[:, 0], data[:, 1]
        du = data[:, 2] if data.shape[1] > 2 else np.gradient(u, w, edge_order=2)
        return cls(gamma=gamma, w_nodes=w, u_values=u, derivative_values=du)


class _Rhs:
    """``F`` with U clamped to the inflated rectangle; counts clamped calls."""

    def __init__(self, p: TwoPointProblem):
        self.a = p.data.coeffs.a
        self.b = p.data.coeffs.b
        self.lo, self.hi = p.clamp_bounds
        self.clamped = 0

    def __call__(self, u: float, w: float) -> float:
        if u < self.lo:
            u = self.lo
            self.clamped += 1
        elif u > self.hi:
            u = self.hi
            self.clamped += 1
        return float(self.b(u, w)) / float(self.a(u, w))


def _integrate(p: TwoPointProblem, gamma: float) -> tuple[np.ndarray, np.ndarray, int]:
    """Classical RK4 on the uniform w-grid; returns ``(U, U', clamped)``."""
    ws = p.w_nodes
    n = p.n_ode
    h = (p.data.w2 - p.data.w1) / n
    F = _Rhs(p)
    U = np.empty(n + 1)
    dU = np.empty(n + 1)
    u = p.data.u1
    U[0] = u
    for i in range(n):
        w = ws[i]
        k1 = gamma * F(u, w)
        dU[i] = k1
        k2 = gamma * F(u + 0.5 * h * k1, w + 0.5 * h)
        k3 = gamma * F(u + 0.5 * h * k2, w + 0.5 * h)
        k4 = gamma * F(u + h * k3, ws[i + 1])
        u = u + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not math.isfinite(u):
            raise NonFiniteTrajectory(f"trajectory became non-finite at w={ws[i + 1]:.6g} (gamma={gamma!r})")
        U[i + 1] = u
    dU[n] = gamma * F(u, ws[n])
    return U, dU, F.clamped


def shoot(p: TwoPointProblem, gamma: float) -> np.ndarray:
    """Trajectory of ``U' = gamma F(U, w)``, ``U(w1) = u1`` on ``p.w_nodes``."""
    return _integrate(p, gamma)[0]


def envelope_bracket(p: TwoPointProblem, report: HypothesisReport) -> tuple[float, float]:
    """Bracket implied by constant envelopes ``p_hat <= F <= q_hat``."""
    d = p.data
    du = d.u2 - d.u1
    dw = d.w2 - d.w1
    if du == 0:
        return 0.0, 0.0
    if not report.p_hat > 0:
        raise BracketingFailed(f"sampled lower envelope p_hat={report.p_hat:g} is not positive")
    lo, hi = du / (report.q_hat * dw), du / (report.p_hat * dw)
    return (lo, hi) if du > 0 else (hi, lo)


def _residual(p: TwoPointProblem, gamma: float) -> float:
    return float(shoot(p, gamma)[-1] - p.data.u2)


def gamma_bracket(
    p: TwoPointProblem,
    report: HypothesisReport | None = None,
    initial: tuple[float, float] | None = None,
) -> tuple[float, float]:
    """Verified bracket ``(lo, hi)`` with ``G(lo) <= 0 <= G(hi)``.

    Starts from the envelope bracket (or ``initial``) and moves an end that
    fails the sign test geometrically away from the other by factors of 2,
    at most 60 times per end.
    """
    d = p.data
    if d.u2 == d.u1:
        return 0.0, 0.0
    if initial is None:
        report = validate_hypotheses(d) if report is None else report
        lo, hi = envelope_bracket(p, report)
    else:
        lo, hi = sorted(float(v) for v in initial)
    sign = 1.0 if d.u2 > d.u1 else -1.0
    # work with |gamma| so that "expanding" always means lo/2, hi*2
    lo, hi = sorted((sign * lo, sign * hi))
    if lo < 0 or hi <= 0:
        raise ValueError(f"bracket seed {initial} does not have the sign of u2 - u1")

    def g(x):
        return sign * _residual(p, sign * x)

    for _ in range(MAX_DOUBLINGS + 1):
        if g(lo) <= 0:
            break
        lo *= 0.5
    else:
        raise BracketingFailed("could not find gamma with U(w2) on the u1 side of u2")
    for _ in range(MAX_DOUBLINGS + 1):
        if g(hi) >= 0:
            break
        hi *= 2.0
    else:
        raise BracketingFailed(
            "could not reach u2 by increasing |gamma|; F may change sign or vanish on R"
        )
    return tuple(sorted((sign * lo, sign * hi)))


def _find_root(g, lo: float, hi: float, glo: float, ghi: float, tol: float) -> tuple[float, int]:
    """Secant iteration safeguarded by bisection on an increasing ``g``."""
    if abs(glo) <= tol:
        return lo, 0
    if abs(ghi) <= tol:
        return hi, 0
    x0, g0, x1, g1 = lo, glo, hi, ghi
    widths = [hi - lo]
    for it in range(1, MAX_ROOT_ITERATIONS + 1):
        x = x1 - g1 * (x1 - x0) / (g1 - g0) if g1 != g0 else math.nan
        # bisect when the secant leaves the bracket or two steps failed to halve it
        stalled = len(widths) >= 3 and widths[-1] > 0.5 * widths[-3]
        if not (lo < x < hi) or stalled:
            x = 0.5 * (lo + hi)
        gx = g(x)
        if abs(gx) <= tol:
            return x, it
        if gx < 0:
            lo = x
        else:
            hi = x
        x0, g0, x1, g1 = x1, g1, x, gx
        widths.append(hi - lo)
        if not lo < 0.5 * (lo + hi) < hi:
            raise MaxIterationsExceeded(
                f"bracket collapsed to [{lo!r}, {hi!r}] with |G| = {abs(gx):.3e} > {tol:.3e}; "
                "tolerance is unreachable at this n_ode"
            )
    raise MaxIterationsExceeded(f"no root with |G| <= {tol:.3e} after {MAX_ROOT_ITERATIONS} iterations")


def solve_two_point(
    p: TwoPointProblem,
    tol_endpoint: float | None = None,
    report: HypothesisReport | None = None,
    bracket: tuple[float, float] | None = None,
) -> TwoPointSolution:
    """Solve for ``(gamma, U)`` with ``|U(w2) - u2| <= tol_endpoint``.

    ``bracket`` optionally seeds the root search instead of the envelope
    bracket (it is still verified and expanded).
    """
    d = p.data
    if tol_endpoint is None:
        tol_endpoint = 1e-12 * max(1.0, abs(d.u2 - d.u1))
    if tol_endpoint <= 0:
        raise ValueError("tol_endpoint must be positive")
    ws = p.w_nodes
    if d.u2 == d.u1:
        return TwoPointSolution(
            gamma=0.0,
            w_nodes=ws,
            u_values=np.full(ws.size, d.u1),
            derivative_values=np.zeros(ws.size),
        )

    lo, hi = gamma_bracket(p, report, initial=bracket)
    glo, ghi = _residual(p, lo), _residual(p, hi)
    gamma, its = _find_root(lambda x: _residual(p, x), lo, hi, glo, ghi, tol_endpoint)
    U, dU, clamped = _integrate(p, gamma)
    warnings = ()
    if clamped:
        warnings = (f"accepted trajectory needed {clamped} clamped coefficient evaluation(s)",)
        log.warning(warnings[0])
    return TwoPointSolution(
        gamma=gamma,
        w_nodes=ws,
        u_values=U,
        derivative_values=dU,
        bracket=(lo, hi),
        iterations=its,
        clamped_evaluations=clamped,
        warnings=warnings,
    )


@dataclass(frozen=True)
class UniquenessCertificate:
    certified: bool
    lipschitz: float | None = None
    source: str = ""
    reason: str = ""


LIPSCHITZ_GROWTH_LIMIT = 1.5


def certify_uniqueness(p: TwoPointProblem, report: HypothesisReport) -> UniquenessCertificate:
    """Certify the Lipschitz condition of ``F`` in ``U`` that makes ``(gamma, U)`` unique.

    A user-supplied hint wins. Otherwise the sampled difference-quotient
    estimate is recomputed on a lattice refined twice (``4n - 3`` points,
    nested); if it grows by more than a factor 1.5 the estimate is treated as
    unbounded and the certificate is withheld. Never raises.
    """
    hint = p.data.coeffs.lipschitz_constant_hint
    if hint is not None:
        return UniquenessCertificate(True, float(hint), "hint")
    coarse = report.lipschitz_estimate
    if not math.isfinite(coarse):
        return UniquenessCertificate(False, None, "sampled", "non-finite difference quotients")
    n_fine = 4 * report.samples_per_axis - 3
    try:
        fine = validate_hypotheses(p.data, n_fine).lipschitz_estimate
    except Exception as exc:  # advisory only
        return UniquenessCertificate(False, None, "sampled", f"refined sampling failed: {exc}")
    if not math.isfinite(fine) or fine > LIPSCHITZ_GROWTH_LIMIT * coarse + 1e-12:
        return UniquenessCertificate(
            False,
            None,
            "sampled",
            f"difference quotients grow under refinement ({coarse:.4g} -> {fine:.4g}); "
            "F looks non-Lipschitz in U",
        )
    return UniquenessCertificate(True, max(coarse, fine), "sampled")
