"""Finite-difference solver for the geometric mixed problem.

    Δz = 0 in Ω,   z = 0 on Γ1,   z = 1 on Γ2,   ∂z/∂n = 0 on Γ3

on a cell-centred :class:`~funcsolve.core_types.TaggedGrid`.

Boundary treatment is face-wise. A Dirichlet face uses the antisymmetric
mirror ghost ``u_ghost = 2 g - u_cell`` (the face value is exactly ``g``);
a Neumann face uses the symmetric mirror ghost ``u_ghost = u_cell``, i.e. the
face flux vanishes. Eliminating the ghosts gives a symmetric M-matrix, so
the discrete maximum principle holds.

The assembly helpers are written for a general divergence-form operator
``-∇·(k ∇u)`` with harmonic-mean face coefficients; the geometric problem is
the special case ``k ≡ 1``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .core_types import ScalarField, Tag, TaggedGrid
from .errors import ConsistencyViolation, SolverStagnation

log = logging.getLogger(__name__)

MAX_PRINCIPLE_SLACK = 1e-12


def harmonic_mean(k1, k2):
    k1 = np.asarray(k1, dtype=float)
    k2 = np.asarray(k2, dtype=float)
    return 2.0 * k1 * k2 / (k1 + k2)


def assemble_operator(
    grid: TaggedGrid,
    cell_coeff: np.ndarray | None = None,
    dirichlet: tuple[float, float] = (0.0, 1.0),
    boundary_coeff: tuple[float, float] | None = None,
) -> tuple[sp.csr_matrix, np.ndarray]:
    """Assemble ``A u = rhs`` for ``-∇·(k ∇u) = 0`` with the grid's mixed data.

    Parameters
    ----------
    grid : TaggedGrid
    cell_coeff : array, optional
        ``k`` at every cell centre; ``None`` means ``k ≡ 1``.
    dirichlet : (g1, g2)
        Values imposed on Γ1 and Γ2 faces.
    boundary_coeff : (k1, k2), optional
        ``k`` evaluated at the boundary data of Γ1 and Γ2. Dirichlet faces use
        the harmonic mean of the cell coefficient and this value. Defaults to
        the cell coefficient itself.

    Returns
    -------
    A : csr_matrix
        Symmetric positive definite; ``-A`` is the discrete ``∇·(k∇·)``.
    rhs : ndarray
    """
    n = grid.n_cells
    k = np.ones(n) if cell_coeff is None else np.asarray(cell_coeff, dtype=float)

    c, nb, axis = grid.interior_faces
    h = grid.spacing(axis)
    wt = harmonic_mean(k[c], k[nb]) / h**2

    bc, baxis, code = grid.boundary_arrays
    dmask = code != 3
    bc, baxis, code = bc[dmask], baxis[dmask], code[dmask]
    hb = grid.spacing(baxis)
    g = np.where(code == 1, dirichlet[0], dirichlet[1])
    if boundary_coeff is None:
        kb = k[bc]
    else:
        kb = harmonic_mean(k[bc], np.where(code == 1, boundary_coeff[0], boundary_coeff[1]))
    bwt = 2.0 * kb / hb**2

    diag = np.zeros(n)
    np.add.at(diag, c, wt)
    np.add.at(diag, nb, wt)
    np.add.at(diag, bc, bwt)
    rhs = np.zeros(n)
    np.add.at(rhs, bc, bwt * g)

    rows = np.concatenate([np.arange(n), c, nb])
    cols = np.concatenate([np.arange(n), nb, c])
    vals = np.concatenate([diag, -wt, -wt])
    A = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    return A, rhs


@dataclass(frozen=True, eq=False)
class MixedLaplaceSystem:
    """The assembled geometric problem ``matrix @ z = rhs`` (``matrix = -Δ_h``)."""

    grid: TaggedGrid
    matrix: sp.csr_matrix
    rhs: np.ndarray


def assemble(grid: TaggedGrid) -> MixedLaplaceSystem:
    A, rhs = assemble_operator(grid)
    rhs.setflags(write=False)
    return MixedLaplaceSystem(grid=grid, matrix=A, rhs=rhs)


def conjugate_gradient(
    A,
    b: np.ndarray,
    x0: np.ndarray | None = None,
    tol: float = 1e-10,
    maxiter: int | None = None,
    jacobi: bool = False,
) -> tuple[np.ndarray, int]:
    """(Preconditioned) conjugate gradients until ``‖b - A x‖ ≤ tol ‖b‖``.

    Returns the solution and the iteration count. Raises
    :class:`SolverStagnation` after ``maxiter`` (default ``10 n``) iterations.
    """
    n = b.shape[0]
    maxiter = 10 * n if maxiter is None else maxiter
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros(n), 0
    target = tol * bnorm
    dinv = 1.0 / A.diagonal() if jacobi else None

    r = b - A @ x
    rnorm = np.linalg.norm(r)
    if rnorm <= target:
        return x, 0
    zr = r * dinv if jacobi else r
    d = zr.copy()
    rz = r @ zr
    for it in range(1, maxiter + 1):
        Ad = A @ d
        alpha = rz / (d @ Ad)
        x += alpha * d
        r -= alpha * Ad
        rnorm = np.linalg.norm(r)
        if rnorm <= target:
            # guard against drift of the recursively updated residual
            rnorm = np.linalg.norm(b - A @ x)
            if rnorm <= target:
                return x, it
            r = b - A @ x
        zr = r * dinv if jacobi else r
        rz_new = r @ zr
        d = zr + (rz_new / rz) * d
        rz = rz_new
    raise SolverStagnation(
        f"CG did not reach relative residual {tol:g} in {maxiter} iterations "
        f"(final {rnorm / bnorm:.3e})"
    )


def solve_z(system: MixedLaplaceSystem, tol: float = 1e-10, jacobi: bool = False) -> ScalarField:
    """Solve the geometric problem; checks ``0 <= z <= 1`` up to 1e-12."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    z, its = conjugate_gradient(system.matrix, system.rhs, tol=tol, jacobi=jacobi)
    log.debug("solve_z: %d unknowns, %d CG iterations", z.size, its)
    if z.min() < -MAX_PRINCIPLE_SLACK or z.max() > 1.0 + MAX_PRINCIPLE_SLACK:
        raise ConsistencyViolation(
            f"discrete maximum principle violated: z in [{z.min():.3e}, {z.max():.3e}]"
        )
    return ScalarField(system.grid, z)


def boundary_flux(
    field: ScalarField,
    tag: Tag,
    dirichlet: tuple[float, float] = (0.0, 1.0),
    cell_coeff: np.ndarray | None = None,
    boundary_coeff: tuple[float, float] | None = None,
) -> float:
    """Total outward flux ``-∫ k ∂u/∂n`` through the faces carrying ``tag``.

    Uses the same face coefficients as :func:`assemble_operator`; Γ3 faces
    carry no flux.
    """
    grid = field.grid
    if tag is Tag.GAMMA3:
        return 0.0
    code_wanted = 1 if tag is Tag.GAMMA1 else 2
    k = np.ones(grid.n_cells) if cell_coeff is None else np.asarray(cell_coeff, dtype=float)
    bc, baxis, code = grid.boundary_arrays
    m = code == code_wanted
    bc, baxis = bc[m], baxis[m]
    g = dirichlet[code_wanted - 1]
    kb = k[bc] if boundary_coeff is None else harmonic_mean(k[bc], boundary_coeff[code_wanted - 1])
    h = grid.spacing(baxis)
    length = np.where(baxis == 0, grid.hy, grid.hx)
    return float(np.sum(-kb * (g - field.values[bc]) / (0.5 * h) * length))
