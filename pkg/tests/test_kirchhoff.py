import math

import numpy as np
import pytest

from conftest import COMMON, EXPO, UNIT, expo_data, one
from funcsolve.core_types import CoefficientPair, ProblemData
from funcsolve.errors import ConsistencyViolation, NonPositiveIntegrand, NotInvertible, OutOfRange
from funcsolve.kirchhoff import MonotoneTransform, build_psi, build_theta, gamma_ratio, invert
from funcsolve.zwirner_ode import TwoPointProblem, solve_two_point


def solved(coeffs, u1, u2, w1=0.0, w2=1.0, n=1024):
    return solve_two_point(TwoPointProblem(ProblemData(w1, w2, u1, u2, coeffs), n))


class TestPsi:
    def test_constant_integrand(self):
        sol = solved(UNIT, 0.0, 2.0, w1=0.25, w2=1.25)
        psi = build_psi(sol, UNIT)
        assert np.max(np.abs(psi.values - (sol.w_nodes - 0.25))) <= 1e-14
        assert psi.values[0] == 0.0

    def test_exponential_second_order(self):
        errs = []
        for n in (256, 512):
            sol = solve_two_point(TwoPointProblem(expo_data(), n))
            psi = build_psi(sol, EXPO)
            errs.append(np.max(np.abs(psi.values - np.expm1(sol.w_nodes))))
        assert errs[0] <= 1e-5
        assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.02)

    def test_w_dependent(self):
        c = CoefficientPair(one, lambda u, w: w + 0.0 * u)
        sol = solved(c, 0.0, 1.0, w1=1.0, w2=2.0)
        psi = build_psi(sol, c)
        exact = (sol.w_nodes**2 - 1.0) / 2
        assert np.max(np.abs(psi.values - exact)) <= 1e-6
        assert psi.direction == 1

    def test_nonpositive_integrand(self):
        sol = solved(UNIT, 0.0, 1.0)
        bad = CoefficientPair(one, lambda u, w: w - 0.5)
        with pytest.raises(NonPositiveIntegrand):
            build_psi(sol, bad)


class TestTheta:
    def test_linear_profile(self):
        sol = solved(UNIT, 0.0, 2.0)
        theta = build_theta(sol, UNIT)
        assert np.max(np.abs(theta.values - 2 * sol.w_nodes)) <= 1e-14

    def test_theta_is_gamma_psi(self):
        for coeffs, u1, u2 in ((COMMON, 0.0, 1.0), (EXPO, 1.0, math.e)):
            sol = solved(coeffs, u1, u2)
            theta, psi = build_theta(sol, coeffs), build_psi(sol, coeffs)
            assert np.max(np.abs(theta.values - sol.gamma * psi.values)) <= 1e-12 * max(1, psi.end)

    def test_zero_gamma(self):
        sol = solved(UNIT, 1.0, 1.0)
        theta = build_theta(sol, UNIT)
        assert np.all(theta.values == 0.0)
        with pytest.raises(NotInvertible):
            invert(theta, 0.0)

    def test_decreasing_with_negative_gamma(self):
        sol = solved(COMMON, 1.0, -1.0)
        theta = build_theta(sol, COMMON)
        assert theta.direction == -1
        w = invert(theta, theta.values[17])
        assert w == sol.w_nodes[17]


class TestGammaRatio:
    def test_example_linear(self):
        sol = solved(UNIT, 0.0, 2.0)
        assert gamma_ratio(build_theta(sol, UNIT), build_psi(sol, UNIT), sol.gamma) == pytest.approx(2.0, rel=1e-14)

    def test_exponential_case(self):
        sol = solve_two_point(TwoPointProblem(expo_data()))
        r = gamma_ratio(build_theta(sol, EXPO), build_psi(sol, EXPO), sol.gamma)
        assert abs(r - 1.0) <= 1e-6

    def test_equal_data(self):
        sol = solved(UNIT, 0.5, 0.5)
        assert gamma_ratio(build_theta(sol, UNIT), build_psi(sol, UNIT)) == 0.0

    def test_mismatch_raises(self):
        sol = solved(UNIT, 0.0, 2.0)
        with pytest.raises(ConsistencyViolation):
            gamma_ratio(build_theta(sol, UNIT), build_psi(sol, UNIT), gamma_shooting=2.001)


class TestInvert:
    def test_linear(self):
        psi = build_psi(solved(UNIT, 0.0, 1.0, w1=0.5, w2=1.5), UNIT)
        assert invert(psi, 0.3) == pytest.approx(0.8, abs=1e-15)

    def test_exponential_end(self):
        sol = solve_two_point(TwoPointProblem(expo_data(), 1024))
        psi = MonotoneTransform(sol.w_nodes, np.expm1(sol.w_nodes))
        assert abs(invert(psi, math.e - 1) - 1.0) <= 1e-9
        built = build_psi(sol, EXPO)
        assert abs(invert(built, built.end) - 1.0) == 0.0

    def test_out_of_range(self):
        psi = build_psi(solved(UNIT, 0.0, 1.0), UNIT)
        with pytest.raises(OutOfRange):
            invert(psi, -1.0)
        assert invert(psi, -1e-13) == 0.0  # within slack: clamped

    def test_node_round_trip_exact(self):
        sol = solved(COMMON, 0.0, 1.0, n=257)
        for t in (build_psi(sol, COMMON), build_theta(sol, COMMON)):
            back = invert(t, t.values)
            assert np.array_equal(back, t.nodes)

    def test_interpolation_error_second_order(self):
        errs = []
        for n in (128, 256):
            w = np.linspace(0, 1, n + 1)
            t = MonotoneTransform(w, np.expm1(w))
            q = np.linspace(0.0, math.e - 1, 1001)
            errs.append(np.max(np.abs(invert(t, q) - np.log1p(q))))
        assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)

    def test_table(self):
        t = MonotoneTransform([0.0, 1.0], [0.0, 2.0], "psi")
        assert t.to_table() == "w,psi\n0,0\n1,2\n"
