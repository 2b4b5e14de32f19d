"""Command-line front end.

    funcsolve solve    CONFIG [-o DIR]
    funcsolve verify   CONFIG [-o DIR] [--threshold T]
    funcsolve converge CONFIG [-o DIR] [--levels N]

Exit codes: 0 ok, 1 usage/parse error, 2 hypothesis violation,
3 solver failure, 4 verification mismatch.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import io
from .config import SolverConfig, load_config
from .core_types import ScalarField, build_grid, validate_hypotheses
from .errors import (
    ConfigError,
    FuncSolveError,
    HypothesisViolation,
    InvalidGeometry,
    InvalidProblem,
    SolverFailure,
)
from .oracle_direct import compare, picard_solve
from .pipeline import PipelineResult, solve_functional

EXIT_OK, EXIT_USAGE, EXIT_HYPOTHESIS, EXIT_SOLVER, EXIT_MISMATCH = 0, 1, 2, 3, 4


def _run(cfg: SolverConfig, refine: int = 0) -> PipelineResult:
    data = cfg.problem()
    validate_hypotheses(data, cfg.samples_per_axis)
    grid = build_grid(cfg.grid_spec(refine))
    t = cfg.tolerances
    return solve_functional(
        data,
        grid,
        n_ode=cfg.n_ode_at(refine),
        tol_endpoint=t.tol_endpoint,
        tol_linear=t.tol_linear,
        samples_per_axis=cfg.samples_per_axis,
    )


def _write_outputs(cfg: SolverConfig, result: PipelineResult, extra=()) -> None:
    io.write(cfg.output_path("fields"), io.fields_csv(result))
    io.write(cfg.output_path("profile"), io.profile_csv(result))
    io.write(cfg.output_path("summary"), io.summary_text(io.summary_items(result) + list(extra)))


def cmd_solve(cfg: SolverConfig) -> int:
    result = _run(cfg)
    _write_outputs(cfg, result)
    res_u, res_w = result.residuals
    print(f"gamma = {io.fmt(result.gamma)}  res_u = {res_u:.3e}  res_w = {res_w:.3e}")
    print(f"wrote {cfg.output_path('summary')}")
    if max(res_u, res_w) > cfg.tolerances.max_residual:
        print(
            f"residual {max(res_u, res_w):.3e} exceeds max_residual {cfg.tolerances.max_residual:g}",
            file=sys.stderr,
        )
        return EXIT_SOLVER
    return EXIT_OK


def cmd_verify(cfg: SolverConfig, threshold: float | None = None) -> int:
    t = cfg.tolerances
    threshold = t.verify_threshold if threshold is None else threshold
    result = _run(cfg)
    direct = picard_solve(
        result.data,
        result.grid,
        tol=t.tol_picard,
        max_iter=t.picard_max_iter,
        damping=t.picard_damping,
    )
    report = compare(result.fsol, direct)
    _write_outputs(cfg, result, io.comparison_items(report, threshold, direct.iteration))
    print(
        f"max |u_f - u_d| = {report.max_du:.3e}  max |w_f - w_d| = {report.max_dw:.3e}  "
        f"(threshold {threshold:g}, {direct.iteration} Picard sweeps)"
    )
    if report.max_difference > threshold:
        print("verification failed: functional and direct solutions disagree", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def restrict(fine: ScalarField, coarse_grid) -> np.ndarray:
    """Average each 2x2 block of fine cells onto the coarse cell it refines."""
    a = fine.as_array()
    blocks = 0.25 * (a[0::2, 0::2] + a[1::2, 0::2] + a[0::2, 1::2] + a[1::2, 1::2])
    return blocks[coarse_grid.inside]


CONVERGENCE_COLUMNS = (
    "level", "h", "n_ode", "gamma", "gamma_drift", "res_u", "res_w",
    "order_res_u", "order_res_w", "diff_max", "diff_rms", "order_max", "order_rms",
)  # fmt: skip


# residuals this small are roundoff (they grow like eps / h^2), not truncation
RESIDUAL_FLOOR = 1e-8


def _order(prev, cur, floor=0.0):
    if prev is None or not (prev > floor and cur > 0):
        return math.nan
    return math.log2(prev / cur)


def convergence_rows(cfg: SolverConfig, levels: int) -> list[dict]:
    """Re-solve at ``levels`` doubled resolutions (n_ode scaled by ``ode_refinement``)."""
    rows = []
    prev = None
    for lvl in range(levels):
        res = _run(cfg, lvl)
        row = {
            "level": lvl,
            "h": res.grid.hx,
            "n_ode": cfg.n_ode_at(lvl),
            "gamma": res.gamma,
            "res_u": res.residuals[0],
            "res_w": res.residuals[1],
        }
        row["gamma_drift"] = abs(res.gamma - rows[0]["gamma"]) if rows else 0.0
        if prev is not None:
            pres, prow = prev
            row["order_res_u"] = _order(prow["res_u"], row["res_u"], RESIDUAL_FLOOR)
            row["order_res_w"] = _order(prow["res_w"], row["res_w"], RESIDUAL_FLOOR)
            du = pres.fsol.u.values - restrict(res.fsol.u, pres.grid)
            dw = pres.fsol.w.values - restrict(res.fsol.w, pres.grid)
            row["diff_max"] = float(max(np.abs(du).max(), np.abs(dw).max()))
            row["diff_rms"] = float(max(np.sqrt(np.mean(du**2)), np.sqrt(np.mean(dw**2))))
            row["order_max"] = _order(prow.get("diff_max"), row["diff_max"])
            row["order_rms"] = _order(prow.get("diff_rms"), row["diff_rms"])
        rows.append(row)
        prev = (res, row)
    for row in rows:
        for col in CONVERGENCE_COLUMNS:
            row.setdefault(col, math.nan)
    return rows


def cmd_converge(cfg: SolverConfig, levels: int) -> int:
    if levels < 2:
        print("--levels must be at least 2", file=sys.stderr)
        return EXIT_USAGE
    rows = convergence_rows(cfg, levels)
    text = ",".join(CONVERGENCE_COLUMNS) + "\n"
    text += "".join(",".join(io.fmt(r[c]) for c in CONVERGENCE_COLUMNS) + "\n" for r in rows)
    io.write(cfg.output_path("convergence"), text)
    for r in rows:
        print(
            f"level {r['level']}: h={r['h']:.4g} n_ode={r['n_ode']} gamma={r['gamma']:.15g} "
            f"res_u={r['res_u']:.3e} res_w={r['res_w']:.3e} "
            f"order(res_w)={r['order_res_w']:.2f} order(field,max)={r['order_max']:.2f} "
            f"order(field,rms)={r['order_rms']:.2f}"
        )
    print(f"wrote {cfg.output_path('convergence')}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="funcsolve",
        description="Functional solutions of coupled divergence-form elliptic systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("solve", "run the functional pipeline and write fields, profile and summary"),
        ("verify", "cross-check the pipeline against the direct Picard solver"),
        ("converge", "tabulate convergence under simultaneous refinement"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("config")
        p.add_argument("-o", "--output-dir", help="override [output] directory")
        if name == "verify":
            p.add_argument("--threshold", type=float, help="override verify_threshold")
        if name == "converge":
            p.add_argument("--levels", type=int, default=3)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config)
        if args.output_dir:
            cfg = cfg.with_output_dir(args.output_dir)
        if args.command == "solve":
            return cmd_solve(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, args.threshold)
        return cmd_converge(cfg, args.levels)
    except (ConfigError, InvalidGeometry) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (HypothesisViolation, InvalidProblem) as exc:
        print(f"hypothesis violation: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (SolverFailure, FuncSolveError) as exc:
        print(f"solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
