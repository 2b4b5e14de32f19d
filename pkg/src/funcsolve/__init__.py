"""Functional solutions of coupled nonlinear divergence-form elliptic systems.

The coupled problem

    ∇·(a(u, w) ∇u) = 0,   ∇·(b(u, w) ∇w) = 0

with u, w prescribed on Γ1 and Γ2 and insulated on Γ3 is reduced to a 1-D
two-point problem with an unknown parameter plus one linear mixed Laplace
problem; the fields are rebuilt through Kirchhoff-type transforms.
"""

from .core_types import (
    CoefficientPair,
    GridSpec,
    HypothesisReport,
    ProblemData,
    ScalarField,
    Tag,
    TaggedGrid,
    build_grid,
    validate_hypotheses,
)
from .kirchhoff import MonotoneTransform, build_psi, build_theta, gamma_ratio, invert
from .laplace_mixed import MixedLaplaceSystem, assemble, solve_z
from .oracle_direct import ComparisonReport, PicardState, compare, picard_solve
from .pipeline import PipelineResult, solve_functional
from .reconstruction import (
    FunctionalSolution,
    pde_residual,
    reconstruct,
    verify_theta_psi_proportionality,
)
from .zwirner_ode import (
    TwoPointProblem,
    TwoPointSolution,
    certify_uniqueness,
    gamma_bracket,
    shoot,
    solve_two_point,
)

__version__ = "0.1.0"
