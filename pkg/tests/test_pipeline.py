import math

import numpy as np
import pytest

from conftest import LSHAPE, MILD, UNIT, expo_data, strip
from funcsolve.core_types import ProblemData
from funcsolve.pipeline import solve_functional


def test_uniqueness_across_resolutions():
    # cell centres of the 32-grid coincide with every third centre of the 96-grid
    data = ProblemData(0.0, 1.0, 0.0, 1.0, MILD)
    coarse = solve_functional(data, strip(32, LSHAPE, "lshape"), n_ode=1024, tol_linear=1e-13)
    fine = solve_functional(data, strip(96, LSHAPE, "lshape"), n_ode=1536, tol_linear=1e-13)
    assert coarse.gamma == pytest.approx(fine.gamma, rel=1e-10)
    fu = fine.fsol.u.as_array()[1::3, 1::3][coarse.grid.inside]
    fw = fine.fsol.w.as_array()[1::3, 1::3][coarse.grid.inside]
    # both are within the O(h^2) discretization tolerance of one functional solution
    # (the re-entrant corner caps the local rate, so the budget is the coarse rms error)
    assert np.max(np.abs(coarse.fsol.u.values - fu)) <= 1e-2
    assert np.sqrt(np.mean((coarse.fsol.w.values - fw) ** 2)) <= 1.5e-3


def test_result_carries_everything():
    r = solve_functional(expo_data(), strip(16))
    assert r.solution is not None and r.theta is not None and r.psi is not None
    assert r.envelope[0] <= r.gamma <= r.envelope[1]
    assert r.diagnostics.passed
    assert r.certificate.certified
    assert r.gamma == pytest.approx(r.gamma_from_transforms, rel=1e-6)


def test_degenerate_result():
    r = solve_functional(ProblemData(0.3, 0.3, 0.0, 1.0, UNIT, degenerate=True), strip(8))
    assert r.solution is None and math.isnan(r.gamma)
    assert np.max(np.abs(r.fsol.u.values - r.grid.x)) <= 1e-10
    assert r.residuals[1] <= 1e-9
