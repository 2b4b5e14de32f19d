import math

import numpy as np
import pytest
from scipy import ndimage

from conftest import EXPO, LSHAPE, STRIP, UNIT, one
from funcsolve.core_types import (
    CoefficientPair,
    GridSpec,
    ProblemData,
    ScalarField,
    Tag,
    build_grid,
    boundary_faces,
    validate_hypotheses,
)
from funcsolve.errors import InvalidGeometry, InvalidProblem, NonPositiveCoefficient


def brute_boundary_faces(inside):
    """Walk every cell and every side; a face is boundary if the neighbour is outside."""
    nx, ny = inside.shape
    out = set()
    for i in range(nx):
        for j in range(ny):
            if not inside[i, j]:
                continue
            for side, (di, dj) in {"W": (-1, 0), "E": (1, 0), "S": (0, -1), "N": (0, 1)}.items():
                a, b = i + di, j + dj
                if not (0 <= a < nx and 0 <= b < ny and inside[a, b]):
                    out.add((i, j, side))
    return out


class TestValidateHypotheses:
    def test_constant_coefficients(self):
        r = validate_hypotheses(ProblemData(0, 1, 0, 2, UNIT))
        assert r.p_hat == r.q_hat == 1.0
        assert r.lipschitz_estimate == 0.0

    def test_f_equals_u_envelope(self):
        r = validate_hypotheses(ProblemData(0, 1, 1, math.e, EXPO), 65)
        assert r.p_hat == pytest.approx(1.0, abs=1e-15)
        assert r.q_hat == pytest.approx(math.e, abs=1e-15)
        dense = np.linspace(1, math.e, 4001)
        assert r.p_hat >= dense.min() - 1e-15 and r.q_hat <= dense.max() + 1e-15
        assert r.lipschitz_estimate == pytest.approx(1.0, rel=1e-12)

    def test_negative_a_rejected(self):
        bad = CoefficientPair(lambda u, w: -1.0 + 0 * u, one)
        with pytest.raises(NonPositiveCoefficient) as exc:
            validate_hypotheses(ProblemData(0, 1, 0, 1, bad))
        assert exc.value.which == "a"

    def test_b_vanishing_inside_rectangle(self):
        bad = CoefficientPair(one, lambda u, w: u - 5.0)
        with pytest.raises(NonPositiveCoefficient):
            validate_hypotheses(ProblemData(0, 1, 4, 6, bad))

    def test_report_states_sampling_limitation(self):
        r = validate_hypotheses(ProblemData(0, 1, 0, 1, UNIT))
        assert "sampl" in r.note.lower()

    @pytest.mark.parametrize("n", [2, 3, 5, 9, 17])
    def test_envelope_monotone_on_nested_lattices(self, n):
        c = CoefficientPair(lambda u, w: 1 + 0.3 * np.sin(5 * u), lambda u, w: 2 + np.cos(3 * w + u))
        p = ProblemData(-1, 2, 0.5, 3.0, c)
        coarse = validate_hypotheses(p, n)
        fine = validate_hypotheses(p, 2 * n - 1)
        assert fine.p_hat <= coarse.p_hat
        assert fine.q_hat >= coarse.q_hat

    def test_needs_two_samples(self):
        with pytest.raises(ValueError):
            validate_hypotheses(ProblemData(0, 1, 0, 1, UNIT), 1)


class TestProblemData:
    def test_reversed_u_allowed(self):
        p = ProblemData(0, 1, 3, 1, UNIT)
        assert p.rectangle == (1, 3, 0, 1)

    def test_w2_below_w1(self):
        with pytest.raises(InvalidProblem):
            ProblemData(1, 0, 0, 1, UNIT)

    def test_equal_w_needs_flag(self):
        with pytest.raises(InvalidProblem):
            ProblemData(0.5, 0.5, 0, 1, UNIT)
        assert ProblemData(0.5, 0.5, 0, 1, UNIT, degenerate=True).degenerate


class TestBuildGrid:
    def test_unit_square_strip(self):
        g = build_grid(GridSpec(32, 32, STRIP))
        assert len(g.face_tags) == 4 * 32
        assert g.count(Tag.GAMMA1) == g.count(Tag.GAMMA2) == 32
        assert g.count(Tag.GAMMA3) == 64

    def test_untagged_top(self):
        tags = {k: v for k, v in STRIP.items() if k != "top"}
        with pytest.raises(InvalidGeometry, match="top"):
            build_grid(GridSpec(8, 8, tags))

    def test_missing_gamma2(self):
        with pytest.raises(InvalidGeometry):
            build_grid(GridSpec(8, 8, {**STRIP, "right": "gamma3"}))

    def test_lshape_connected(self):
        g = build_grid(GridSpec(16, 16, LSHAPE, "lshape"))
        _, ncomp = ndimage.label(g.inside)
        assert ncomp == 1
        assert g.n_cells == 16 * 16 - 8 * 8
        assert g.count(Tag.GAMMA2) == 8  # right edge of the lower arm

    def test_lshape_needs_even_sizes(self):
        with pytest.raises(InvalidGeometry):
            build_grid(GridSpec(15, 16, LSHAPE, "lshape"))

    @pytest.mark.parametrize("spec", [GridSpec(7, 5, STRIP), GridSpec(12, 8, LSHAPE, "lshape"), GridSpec(1, 9, STRIP)])
    def test_tagged_faces_equal_boundary_faces(self, spec):
        g = build_grid(spec)
        assert set(g.face_tags) == brute_boundary_faces(g.inside)
        assert set(boundary_faces(g.inside)) == brute_boundary_faces(g.inside)

    def test_disconnected_mask_rejected(self):
        from funcsolve.core_types import TaggedGrid

        inside = np.ones((5, 4), bool)
        inside[2, :] = False
        tags = {f: (Tag.GAMMA1 if f[2] == "W" else Tag.GAMMA2 if f[2] == "E" else Tag.GAMMA3) for f in boundary_faces(inside)}
        with pytest.raises(InvalidGeometry, match="connected"):
            TaggedGrid(5, 4, 0.2, 0.25, inside, tags)

    def test_cell_centres(self):
        g = build_grid(GridSpec(4, 2, STRIP, lx=2.0))
        assert g.hx == 0.5 and g.hy == 0.5
        assert np.allclose(np.unique(g.x), [0.25, 0.75, 1.25, 1.75])


class TestScalarField:
    def test_rejects_nonfinite(self, strip32):
        v = np.zeros(strip32.n_cells)
        v[3] = np.nan
        with pytest.raises(ValueError):
            ScalarField(strip32, v)

    def test_read_only(self, strip32):
        f = ScalarField(strip32, np.zeros(strip32.n_cells))
        with pytest.raises(ValueError):
            f.values[0] = 1.0

    def test_as_array_round_trip(self, strip32):
        f = ScalarField(strip32, strip32.x + 2 * strip32.y)
        a = f.as_array()
        assert a.shape == (32, 32)
        assert np.array_equal(a[strip32.inside], f.values)
