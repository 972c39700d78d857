"""Direct solvers for the tridiagonal, lower-bidiagonal and saddle point systems."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .assembly import SplsSystem, TriDiag
from .errors import ContractError, InfSupError, ParameterError, SingularMatrixError
from .mesh_fem import P1Function, P2Function

PIVOT_FLOOR = 1e-300
BIDIAGONAL_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class Solution:
    coeffs: np.ndarray
    residual_inf: float


def _residual(matrix: TriDiag, x, rhs) -> float:
    return float(np.max(np.abs(matrix.matvec(x) - rhs), initial=0.0))


def thomas_solve(matrix: TriDiag, rhs) -> Solution:
    """Tridiagonal elimination without pivoting.

    Raises SingularMatrixError as soon as a pivot falls below 1e-300 in magnitude.
    """
    rhs = np.asarray(rhs, dtype=float)
    m = matrix.size
    if rhs.shape != (m,):
        raise ParameterError(f"right-hand side has shape {rhs.shape}, matrix is {m}x{m}")
    a, b, c = matrix.sub, matrix.diag, matrix.sup
    cp = np.empty(max(m - 1, 0))
    dp = np.empty(m)
    pivot = b[0]
    if abs(pivot) <= PIVOT_FLOOR:
        raise SingularMatrixError("zero pivot at row 0", 0)
    if m > 1:
        cp[0] = c[0] / pivot
    dp[0] = rhs[0] / pivot
    for i in range(1, m):
        pivot = b[i] - a[i - 1] * cp[i - 1]
        if abs(pivot) <= PIVOT_FLOOR:
            raise SingularMatrixError(f"zero pivot at row {i}", i)
        if i < m - 1:
            cp[i] = c[i] / pivot
        dp[i] = (rhs[i] - a[i - 1] * dp[i - 1]) / pivot
    x = dp
    for i in range(m - 2, -1, -1):
        x[i] -= cp[i] * x[i + 1]
    return Solution(x, _residual(matrix, x, rhs))


def forward_solve_bidiagonal(matrix: TriDiag, rhs) -> Solution:
    """Forward sweep for a lower-bidiagonal system (super-diagonal zero)."""
    rhs = np.asarray(rhs, dtype=float)
    m = matrix.size
    if rhs.shape != (m,):
        raise ParameterError(f"right-hand side has shape {rhs.shape}, matrix is {m}x{m}")
    if np.any(np.abs(matrix.sup) > BIDIAGONAL_TOL):
        raise ContractError("matrix is not lower bidiagonal: super-diagonal exceeds 1e-14")
    if np.any(np.abs(matrix.diag) <= PIVOT_FLOOR):
        i = int(np.flatnonzero(np.abs(matrix.diag) <= PIVOT_FLOOR)[0])
        raise SingularMatrixError(f"zero diagonal at row {i}", i)
    x = np.empty(m)
    x[0] = rhs[0] / matrix.diag[0]
    for i in range(1, m):
        x[i] = (rhs[i] - matrix.sub[i - 1] * x[i - 1]) / matrix.diag[i]
    return Solution(x, _residual(matrix, x, rhs))


@dataclass(frozen=True, eq=False)
class SplsSolution:
    w: P2Function
    u: P1Function
    residual_inf: float


def spls_solve(system: SplsSystem) -> SplsSolution:
    """Schur complement solve: (B^T A^-1 B) u = B^T A^-1 F, then w = A^-1 (F - B u)."""
    A, B, F = system.A, system.B, system.F
    try:
        chol = scipy.linalg.cho_factor(A)
    except np.linalg.LinAlgError as exc:
        raise InfSupError(f"A block is not positive definite: {exc}") from exc
    AinvB = scipy.linalg.cho_solve(chol, B)
    AinvF = scipy.linalg.cho_solve(chol, F)
    schur = B.T @ AinvB
    try:
        schur_chol = scipy.linalg.cho_factor(schur)
    except np.linalg.LinAlgError as exc:
        raise InfSupError(f"Schur complement is singular (discrete inf-sup fails): {exc}") from exc
    u = scipy.linalg.cho_solve(schur_chol, B.T @ AinvF)
    w = AinvF - AinvB @ u
    r1 = A @ w + B @ u - F
    r2 = B.T @ w
    residual = float(max(np.max(np.abs(r1)), np.max(np.abs(r2), initial=0.0)))
    mesh = system.mesh
    m = mesh.n - 1
    return SplsSolution(P2Function(mesh, w[:m], w[m:]), P1Function(mesh, u), residual)
