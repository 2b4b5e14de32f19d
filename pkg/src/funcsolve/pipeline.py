"""End-to-end functional solve.

validate_hypotheses -> solve_two_point -> build_psi / build_theta ->
assemble / solve_z -> reconstruct -> diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core_types import HypothesisReport, ProblemData, TaggedGrid, ScalarField, validate_hypotheses
from .kirchhoff import MonotoneTransform, build_psi, build_theta, gamma_ratio
from .laplace_mixed import assemble, solve_z
from .reconstruction import (
    DiagnosticReport,
    FunctionalSolution,
    pde_residual,
    reconstruct,
    reconstruct_degenerate,
    verify_theta_psi_proportionality,
)
from .zwirner_ode import (
    TwoPointProblem,
    TwoPointSolution,
    UniquenessCertificate,
    certify_uniqueness,
    envelope_bracket,
    solve_two_point,
)


@dataclass(frozen=True, eq=False)
class PipelineResult:
    data: ProblemData
    report: HypothesisReport
    z: ScalarField
    fsol: FunctionalSolution
    residuals: tuple[float, float]
    envelope: tuple[float, float] = (math.nan, math.nan)
    solution: TwoPointSolution | None = None
    theta: MonotoneTransform | None = None
    psi: MonotoneTransform | None = None
    gamma_from_transforms: float = math.nan
    diagnostics: DiagnosticReport | None = None
    certificate: UniquenessCertificate | None = None

    @property
    def gamma(self) -> float:
        return self.fsol.gamma

    @property
    def grid(self) -> TaggedGrid:
        return self.z.grid


def solve_functional(
    data: ProblemData,
    grid: TaggedGrid,
    n_ode: int = 1024,
    tol_endpoint: float | None = None,
    tol_linear: float = 1e-10,
    samples_per_axis: int = 33,
    bracket: tuple[float, float] | None = None,
    diagnostic_tol: float = 1e-6,
) -> PipelineResult:
    report = validate_hypotheses(data, samples_per_axis)
    z = solve_z(assemble(grid), tol=tol_linear)

    if data.degenerate:
        fsol = reconstruct_degenerate(data, z, n_ode)
        return PipelineResult(
            data=data,
            report=report,
            z=z,
            fsol=fsol,
            residuals=pde_residual(fsol, data.coeffs),
        )

    problem = TwoPointProblem(data, n_ode)
    sol = solve_two_point(problem, tol_endpoint, report=report, bracket=bracket)
    psi = build_psi(sol, data.coeffs)
    theta = build_theta(sol, data.coeffs)
    ratio = gamma_ratio(theta, psi, sol.gamma)
    fsol = reconstruct(sol, psi, z, theta)
    return PipelineResult(
        data=data,
        report=report,
        z=z,
        fsol=fsol,
        residuals=pde_residual(fsol, data.coeffs),
        envelope=envelope_bracket(problem, report),
        solution=sol,
        theta=theta,
        psi=psi,
        gamma_from_transforms=ratio,
        diagnostics=verify_theta_psi_proportionality(fsol, theta, psi, diagnostic_tol),
        certificate=certify_uniqueness(problem, report),
    )
