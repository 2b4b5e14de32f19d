"""Exception hierarchy.

Two umbrella classes let callers (notably the CLI) map failures to exit codes:
:class:`HypothesisViolation` for inputs outside the admissible class, and
:class:`SolverFailure` for numerical breakdowns on admissible inputs.
"""


class FuncSolveError(Exception):
    """Base class for all package errors."""


class HypothesisViolation(FuncSolveError):
    """The problem data violate a standing hypothesis (positivity, sign of F, ...)."""


class SolverFailure(FuncSolveError):
    """A numerical stage failed on otherwise admissible data."""


class InvalidProblem(FuncSolveError, ValueError):
    pass


class InvalidGeometry(FuncSolveError, ValueError):
    pass


class NonPositiveCoefficient(HypothesisViolation):
    def __init__(self, u: float, w: float, which: str, value: float | None = None):
        self.u = u
        self.w = w
        self.which = which
        self.value = value
        msg = f"coefficient {which}(u={u:.6g}, w={w:.6g})"
        if value is not None:
            msg += f" = {value:.6g}"
        super().__init__(msg + " is not positive")


class NonFiniteCoefficient(HypothesisViolation):
    def __init__(self, u: float, w: float, which: str):
        self.u, self.w, self.which = u, w, which
        super().__init__(f"{which}(u={u:.6g}, w={w:.6g}) is not finite")


class BracketingFailed(HypothesisViolation):
    """No sign change of the shooting residual was found (F may change sign)."""


class NonFiniteTrajectory(SolverFailure):
    pass


class MaxIterationsExceeded(SolverFailure):
    pass


class SolverStagnation(SolverFailure):
    pass


class NonPositiveIntegrand(HypothesisViolation):
    pass


class ConsistencyViolation(SolverFailure):
    pass


class NotInvertible(SolverFailure):
    pass


class OutOfRange(SolverFailure):
    pass


class NoConvergence(SolverFailure):
    def __init__(self, message: str, state=None):
        super().__init__(message)
        self.state = state


class GridMismatch(FuncSolveError, ValueError):
    pass


class ConfigError(FuncSolveError, ValueError):
    pass
