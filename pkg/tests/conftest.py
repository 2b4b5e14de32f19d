import math

import numpy as np
import pytest

from funcsolve.core_types import CoefficientPair, GridSpec, ProblemData, build_grid

STRIP = {"left": "gamma1", "right": "gamma2", "bottom": "gamma3", "top": "gamma3"}
VERTICAL = {"left": "gamma3", "right": "gamma3", "bottom": "gamma1", "top": "gamma2"}
LSHAPE = {
    "left": "gamma1",
    "bottom": "gamma3",
    "right": "gamma2",
    "inner_right": "gamma3",
    "inner_top": "gamma3",
    "top": "gamma3",
}


def one(u, w):
    return 1.0 + 0.0 * np.asarray(u) * np.asarray(w)


def quad(u, w):
    return 1.0 + u**2 + w**2


UNIT = CoefficientPair(one, one)
COMMON = CoefficientPair(quad, quad)
EXPO = CoefficientPair(one, lambda u, w: u)  # closed form: U = e^w, gamma = 1
MILD = CoefficientPair(lambda u, w: 1 + 0.5 * u + 0.2 * w, lambda u, w: np.exp(0.3 * u + 0.5 * w))


def expo_data():
    return ProblemData(0.0, 1.0, 1.0, math.e, EXPO)


def strip(n, tags=STRIP, shape="rectangle"):
    return build_grid(GridSpec(n, n, tags, shape))


@pytest.fixture
def strip32():
    return strip(32)


ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number: int, passed: bool, detail: str) -> str:
    line = f"{'PASS' if passed else 'FAIL'} criterion {number:2d}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
