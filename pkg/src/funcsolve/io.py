"""CSV and ``key = value`` summary writers (17 significant digits)."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .oracle_direct import ComparisonReport
from .pipeline import PipelineResult


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return "none"
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def fields_csv(result: PipelineResult) -> str:
    f = result.fsol
    g = result.grid
    cols = np.column_stack([g.x, g.y, f.z.values, f.w.values, f.u.values])
    rows = [",".join(fmt(v) for v in row) for row in cols]
    return "x,y,z,w,u\n" + "\n".join(rows) + "\n"


def profile_csv(result: PipelineResult) -> str:
    sol = result.solution
    if sol is None:
        return "w,U,dU\n"
    cols = np.column_stack([sol.w_nodes, sol.u_values, sol.derivative_values])
    return "w,U,dU\n" + "\n".join(",".join(fmt(v) for v in row) for row in cols) + "\n"


def summary_items(result: PipelineResult) -> list[tuple[str, object]]:
    r = result.report
    sol = result.solution
    diag = result.diagnostics
    cert = result.certificate
    g = result.grid
    items = [
        ("gamma", result.gamma),
        ("gamma_lo", result.envelope[0]),
        ("gamma_hi", result.envelope[1]),
        ("bracket_lo", sol.bracket[0] if sol else math.nan),
        ("bracket_hi", sol.bracket[1] if sol else math.nan),
        ("gamma_ratio", result.gamma_from_transforms),
        ("psi_w2", result.fsol.psi_w2),
        ("theta_w2", result.fsol.theta_w2),
        ("res_u", result.residuals[0]),
        ("res_w", result.residuals[1]),
        ("theta_psi_dev", diag.theta_gamma_psi_dev if diag else math.nan),
        ("psi_z_dev", diag.psi_z_dev if diag else math.nan),
        ("unique_certified", bool(cert.certified) if cert else False),
        ("lipschitz", cert.lipschitz if cert and cert.lipschitz is not None else math.nan),
        ("p_hat", r.p_hat),
        ("q_hat", r.q_hat),
        ("lipschitz_estimate", r.lipschitz_estimate),
        ("degenerate", result.data.degenerate),
        ("nx", g.nx),
        ("ny", g.ny),
        ("n_ode", sol.n_ode if sol else 0),
        ("root_iterations", sol.iterations if sol else 0),
        ("clamped_evaluations", sol.clamped_evaluations if sol else 0),
        ("z_min", result.z.min()),
        ("z_max", result.z.max()),
        ("w_min", result.fsol.w.min()),
        ("w_max", result.fsol.w.max()),
    ]
    return items


def comparison_items(cmp: ComparisonReport, threshold: float, iterations: int) -> list[tuple[str, object]]:
    return [
        ("picard_iterations", iterations),
        ("max_du", cmp.max_du),
        ("max_dw", cmp.max_dw),
        ("energy_du", cmp.energy_u),
        ("energy_dw", cmp.energy_w),
        ("verify_threshold", threshold),
        ("verify_passed", cmp.max_difference <= threshold),
    ]


def summary_text(items) -> str:
    return "".join(f"{k} = {fmt(v)}\n" for k, v in items)


def parse_summary(text: str) -> dict[str, str]:
    out = {}
    for line in text.splitlines():
        if "=" in line:
            k, _, v = line.partition("=")
            out[k.strip()] = v.strip()
    return out


def write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
