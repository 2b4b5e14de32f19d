"""Shared domain types: coefficients, problem data, tagged grids and fields.

The computational domain is a cell-centred structured grid. Every inside cell
carries one unknown located at its centre; every face between an inside cell
and the outside is a boundary face and carries exactly one tag:

* ``Tag.GAMMA1`` -- Dirichlet, ``u = u1``, ``w = w1`` (``z = 0``)
* ``Tag.GAMMA2`` -- Dirichlet, ``u = u2``, ``w = w2`` (``z = 1``)
* ``Tag.GAMMA3`` -- homogeneous Neumann (insulated / impermeable)
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Mapping

import numpy as np

from .errors import (
    InvalidGeometry,
    InvalidProblem,
    NonFiniteCoefficient,
    NonPositiveCoefficient,
)

Coefficient = Callable[[np.ndarray, np.ndarray], np.ndarray]


class Tag(str, enum.Enum):
    GAMMA1 = "gamma1"
    GAMMA2 = "gamma2"
    GAMMA3 = "gamma3"

    @classmethod
    def parse(cls, value: "Tag | str") -> "Tag":
        if isinstance(value, Tag):
            return value
        key = str(value).strip().lower().replace("γ", "gamma").replace("_", "")
        for tag in cls:
            if key in (tag.value, tag.value[-1]):
                return tag
        raise InvalidGeometry(f"unknown boundary tag {value!r}")


# side -> (axis, outward sign)
SIDES = {"W": (0, -1), "E": (0, 1), "S": (1, -1), "N": (1, 1)}


def evaluate(f: Coefficient, u, w) -> np.ndarray:
    """Evaluate a coefficient on (broadcast) arrays, accepting scalar-returning callables."""
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    shape = np.broadcast(u, w).shape
    return np.broadcast_to(np.asarray(f(u, w), dtype=float), shape)


@dataclass(frozen=True)
class CoefficientPair:
    """The diffusivities ``a(u, w)`` (for u) and ``b(u, w)`` (for w).

    Both callables must accept numpy arrays and broadcast like ufuncs.
    ``lipschitz_constant_hint`` is an optional user-known Lipschitz bound of
    ``F = b / a`` in ``u`` over the rectangle R; it takes precedence over the
    sampled estimate when certifying uniqueness.
    """

    a: Coefficient
    b: Coefficient
    lipschitz_constant_hint: float | None = None

    def __post_init__(self):
        hint = self.lipschitz_constant_hint
        if hint is not None and not (np.isfinite(hint) and hint >= 0):
            raise InvalidProblem("lipschitz_constant_hint must be a nonnegative finite number")

    def eval_a(self, u, w) -> np.ndarray:
        return evaluate(self.a, u, w)

    def eval_b(self, u, w) -> np.ndarray:
        return evaluate(self.b, u, w)

    def ratio(self, u, w) -> np.ndarray:
        """``F(u, w) = b(u, w) / a(u, w)``."""
        return self.eval_b(u, w) / self.eval_a(u, w)


@dataclass(frozen=True)
class ProblemData:
    """Boundary constants and coefficients of the coupled system.

    ``w1 == w2`` is only accepted with ``degenerate=True``; the system then
    uncouples (``w`` is constant) and only the u-equation is solved.
    """

    w1: float
    w2: float
    u1: float
    u2: float
    coeffs: CoefficientPair
    degenerate: bool = False

    def __post_init__(self):
        for name in ("w1", "w2", "u1", "u2"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise InvalidProblem(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, float(v))
        if self.w2 < self.w1:
            raise InvalidProblem(f"need w2 > w1, got w1={self.w1}, w2={self.w2}")
        if self.w2 == self.w1 and not self.degenerate:
            raise InvalidProblem("w1 == w2 requires degenerate=True (uncoupled problem)")
        if self.degenerate and self.w2 != self.w1:
            raise InvalidProblem("degenerate=True requires w1 == w2")

    @property
    def u_lo(self) -> float:
        return min(self.u1, self.u2)

    @property
    def u_hi(self) -> float:
        return max(self.u1, self.u2)

    @property
    def rectangle(self) -> tuple[float, float, float, float]:
        """R as ``(u_lo, u_hi, w1, w2)``."""
        return self.u_lo, self.u_hi, self.w1, self.w2


def _lattice(lo: float, hi: float, n: int) -> np.ndarray:
    # k/(n-1) keeps lattices with n and 2n-1 points bitwise nested
    return lo + (hi - lo) * (np.arange(n) / (n - 1))


@dataclass(frozen=True)
class HypothesisReport:
    samples_per_axis: int
    a_min: float
    a_max: float
    b_min: float
    b_max: float
    p_hat: float
    q_hat: float
    lipschitz_estimate: float
    note: str = (
        "advisory: positivity and envelopes were checked on a finite lattice only; "
        "sampling cannot prove them on all of R"
    )


def validate_hypotheses(p: ProblemData, samples_per_axis: int = 33) -> HypothesisReport:
    """Sample ``a``, ``b`` and ``F = b/a`` on a lattice over R.

    Raises :class:`NonPositiveCoefficient` at the first sample (in lattice
    order) where ``a`` or ``b`` is not positive. ``p_hat``/``q_hat`` are the
    sampled min/max of ``F``; ``lipschitz_estimate`` is the largest difference
    quotient of ``F`` between u-adjacent samples.
    """
    if samples_per_axis < 2:
        raise ValueError("samples_per_axis must be >= 2")
    n = int(samples_per_axis)
    us = _lattice(p.u_lo, p.u_hi, n)
    ws = _lattice(p.w1, p.w2, n)
    U, W = np.meshgrid(us, ws, indexing="ij")

    values = {}
    for which, fn in (("a", p.coeffs.eval_a), ("b", p.coeffs.eval_b)):
        v = np.array(fn(U, W), dtype=float)
        bad = ~np.isfinite(v)
        if bad.any():
            k = np.flatnonzero(bad)[0]
            raise NonFiniteCoefficient(U.flat[k], W.flat[k], which)
        bad = v <= 0
        if bad.any():
            k = np.flatnonzero(bad)[0]
            raise NonPositiveCoefficient(U.flat[k], W.flat[k], which, v.flat[k])
        values[which] = v

    F = values["b"] / values["a"]
    if not np.all(np.isfinite(F)):
        k = np.flatnonzero(~np.isfinite(F))[0]
        raise NonFiniteCoefficient(U.flat[k], W.flat[k], "F")

    du = us[1] - us[0]
    lip = float(np.max(np.abs(np.diff(F, axis=0))) / du) if du > 0 else 0.0
    return HypothesisReport(
        samples_per_axis=n,
        a_min=float(values["a"].min()),
        a_max=float(values["a"].max()),
        b_min=float(values["b"].min()),
        b_max=float(values["b"].max()),
        p_hat=float(F.min()),
        q_hat=float(F.max()),
        lipschitz_estimate=lip,
    )


# --------------------------------------------------------------------------- grids


@dataclass(frozen=True)
class GridSpec:
    """Declarative geometry: a rectangle or an L-shape with tagged edge segments.

    ``shape="lshape"`` removes the upper-right quadrant ``[lx/2, lx] x [ly/2, ly]``
    (``nx`` and ``ny`` must then be even). Edge segments are

    * rectangle: ``left, right, bottom, top``
    * lshape: ``left, bottom, right`` (lower arm), ``inner_top``,
      ``inner_right``, ``top`` (upper arm)
    """

    nx: int
    ny: int
    tags: Mapping[str, Tag | str]
    shape: str = "rectangle"
    lx: float = 1.0
    ly: float = 1.0

    SEGMENTS = {
        "rectangle": ("left", "right", "bottom", "top"),
        "lshape": ("left", "bottom", "right", "inner_top", "inner_right", "top"),
    }


@dataclass(frozen=True, eq=False)
class TaggedGrid:
    """Cell-centred grid with an inside mask and tagged boundary faces.

    ``inside[i, j]`` selects cell ``(i, j)`` with centre
    ``((i + 1/2) hx, (j + 1/2) hy)``. ``face_tags`` maps ``(i, j, side)``
    with side in ``W, E, S, N`` to a :class:`Tag`; its key set must equal the
    set of faces separating an inside cell from the outside.
    """

    nx: int
    ny: int
    hx: float
    hy: float
    inside: np.ndarray
    face_tags: Mapping[tuple[int, int, str], Tag]

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise InvalidGeometry("nx and ny must be positive")
        if not (self.hx > 0 and self.hy > 0):
            raise InvalidGeometry("hx and hy must be positive")
        inside = np.array(self.inside, dtype=bool)
        if inside.shape != (self.nx, self.ny):
            raise InvalidGeometry(f"inside mask has shape {inside.shape}, expected {(self.nx, self.ny)}")
        if not inside.any():
            raise InvalidGeometry("inside region is empty")
        inside.setflags(write=False)
        object.__setattr__(self, "inside", inside)
        tags = {k: Tag.parse(v) for k, v in dict(self.face_tags).items()}
        object.__setattr__(self, "face_tags", tags)

        expected = set(boundary_faces(inside))
        got = set(tags)
        if got != expected:
            missing = sorted(expected - got)
            extra = sorted(got - expected)
            parts = []
            if missing:
                parts.append(f"{len(missing)} untagged boundary face(s), e.g. {missing[0]}")
            if extra:
                parts.append(f"{len(extra)} tag(s) on non-boundary faces, e.g. {extra[0]}")
            raise InvalidGeometry("; ".join(parts))
        present = set(tags.values())
        for t in (Tag.GAMMA1, Tag.GAMMA2):
            if t not in present:
                raise InvalidGeometry(f"no face is tagged {t.value}; the mixed problem is degenerate")
        if not _is_connected(inside):
            raise InvalidGeometry("inside region is not connected")

    def __eq__(self, other):
        if not isinstance(other, TaggedGrid):
            return NotImplemented
        return (
            self.nx == other.nx
            and self.ny == other.ny
            and self.hx == other.hx
            and self.hy == other.hy
            and np.array_equal(self.inside, other.inside)
            and self.face_tags == other.face_tags
        )

    __hash__ = object.__hash__

    @cached_property
    def index(self) -> np.ndarray:
        """``(nx, ny)`` array mapping a cell to its unknown number, -1 outside."""
        idx = -np.ones((self.nx, self.ny), dtype=np.int64)
        idx[self.inside] = np.arange(int(self.inside.sum()))
        idx.setflags(write=False)
        return idx

    @property
    def n_cells(self) -> int:
        return int(self.inside.sum())

    @cached_property
    def cells(self) -> tuple[np.ndarray, np.ndarray]:
        """Integer ``(i, j)`` of each unknown, in unknown order."""
        ii, jj = np.nonzero(self.inside)
        return ii, jj

    @property
    def x(self) -> np.ndarray:
        return (self.cells[0] + 0.5) * self.hx

    @property
    def y(self) -> np.ndarray:
        return (self.cells[1] + 0.5) * self.hy

    @cached_property
    def interior_faces(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(cell, neighbour, axis)`` for every inside-inside face, each counted once."""
        idx = self.index
        out_c, out_n, out_ax = [], [], []
        for axis in (0, 1):
            a = idx[:-1, :] if axis == 0 else idx[:, :-1]
            b = idx[1:, :] if axis == 0 else idx[:, 1:]
            m = (a >= 0) & (b >= 0)
            out_c.append(a[m])
            out_n.append(b[m])
            out_ax.append(np.full(int(m.sum()), axis))
        return np.concatenate(out_c), np.concatenate(out_n), np.concatenate(out_ax)

    @cached_property
    def boundary_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(cell, axis, tag_code)`` per boundary face, tag codes 1, 2, 3, in sorted face order."""
        keys = sorted(self.face_tags)
        cell = np.array([self.index[i, j] for i, j, _ in keys], dtype=np.int64)
        axis = np.array([SIDES[s][0] for _, _, s in keys], dtype=np.int64)
        code = np.array([int(self.face_tags[k].value[-1]) for k in keys], dtype=np.int64)
        return cell, axis, code

    def spacing(self, axis) -> np.ndarray | float:
        return np.where(np.asarray(axis) == 0, self.hx, self.hy)

    def count(self, tag: Tag) -> int:
        return sum(1 for t in self.face_tags.values() if t is tag)


def boundary_faces(inside: np.ndarray):
    """Yield every ``(i, j, side)`` separating an inside cell from the outside."""
    nx, ny = inside.shape
    for i, j in zip(*np.nonzero(inside)):
        i, j = int(i), int(j)
        for side, (axis, sign) in SIDES.items():
            ni, nj = (i + sign, j) if axis == 0 else (i, j + sign)
            if not (0 <= ni < nx and 0 <= nj < ny) or not inside[ni, nj]:
                yield (i, j, side)


def _is_connected(inside: np.ndarray) -> bool:
    nx, ny = inside.shape
    start = tuple(int(v) for v in np.argwhere(inside)[0])
    seen = np.zeros_like(inside)
    seen[start] = True
    queue = deque([start])
    while queue:
        i, j = queue.popleft()
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            a, b = i + di, j + dj
            if 0 <= a < nx and 0 <= b < ny and inside[a, b] and not seen[a, b]:
                seen[a, b] = True
                queue.append((a, b))
    return bool(seen.sum() == inside.sum())


def _segment(nx: int, ny: int, i: int, j: int, side: str) -> str:
    # both supported shapes are convex towards W and S
    if side == "W":
        return "left"
    if side == "S":
        return "bottom"
    if side == "E":
        return "right" if i == nx - 1 else "inner_right"
    return "top" if j == ny - 1 else "inner_top"


def build_grid(spec: GridSpec) -> TaggedGrid:
    """Build and validate a :class:`TaggedGrid` from a :class:`GridSpec`."""
    if spec.shape not in GridSpec.SEGMENTS:
        raise InvalidGeometry(f"unknown shape {spec.shape!r}; expected one of {sorted(GridSpec.SEGMENTS)}")
    if spec.nx < 1 or spec.ny < 1:
        raise InvalidGeometry("nx and ny must be positive")
    if not (spec.lx > 0 and spec.ly > 0):
        raise InvalidGeometry("lx and ly must be positive")
    segments = GridSpec.SEGMENTS[spec.shape]
    unknown = set(spec.tags) - set(segments)
    if unknown:
        raise InvalidGeometry(f"unknown edge segment(s) {sorted(unknown)} for shape {spec.shape!r}")
    missing = [s for s in segments if s not in spec.tags]
    if missing:
        raise InvalidGeometry(f"edge segment(s) {missing} have no boundary tag")
    tags = {s: Tag.parse(t) for s, t in spec.tags.items()}

    inside = np.ones((spec.nx, spec.ny), dtype=bool)
    if spec.shape == "lshape":
        if spec.nx % 2 or spec.ny % 2 or spec.nx < 2 or spec.ny < 2:
            raise InvalidGeometry("the L-shape needs even nx and ny")
        inside[spec.nx // 2 :, spec.ny // 2 :] = False

    face_tags = {
        face: tags[_segment(spec.nx, spec.ny, *face)] for face in boundary_faces(inside)
    }
    return TaggedGrid(
        nx=spec.nx,
        ny=spec.ny,
        hx=spec.lx / spec.nx,
        hy=spec.ly / spec.ny,
        inside=inside,
        face_tags=face_tags,
    )


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real values, one per inside cell of ``grid`` (in unknown order)."""

    grid: TaggedGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.n_cells,):
            raise ValueError(f"field has shape {v.shape}, grid has {self.grid.n_cells} cells")
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def as_array(self) -> np.ndarray:
        """``(nx, ny)`` array, NaN outside the domain."""
        out = np.full((self.grid.nx, self.grid.ny), np.nan)
        out[self.grid.cells] = self.values
        return out

    def min(self) -> float:
        return float(self.values.min())

    def max(self) -> float:
        return float(self.values.max())
