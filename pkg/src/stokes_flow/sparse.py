"""Triplet assembly and the linear-solve contract shared by every method."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

DEFAULT_TOL = 1e-10
_TINY = np.finfo(float).tiny


class Triplet(NamedTuple):
    row: int
    col: int
    value: float


class LinearSolveError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (relative residual {residual:.3e})")
        self.residual = residual


class SingularMatrix(LinearSolveError):
    pass


class NoConvergence(LinearSolveError):
    pass


@dataclass
class SolveReport:
    solution: np.ndarray
    relative_residual: float
    method_tag: str


def from_coo(rows, cols, vals, shape: tuple[int, int]) -> sp.csr_matrix:
    """Vectorised assembly; duplicate ``(row, col)`` entries are summed."""
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    vals = np.asarray(vals, dtype=float)
    n_rows, n_cols = shape
    bad = (rows < 0) | (rows >= n_rows) | (cols < 0) | (cols >= n_cols)
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise IndexError(
            f"triplet ({rows[k]}, {cols[k]}) out of range for {n_rows}x{n_cols} matrix"
        )
    A = sp.csr_matrix((vals, (rows, cols)), shape=shape)
    A.sum_duplicates()
    A.eliminate_zeros()
    return A


def from_triplets(triplets: Iterable, n_rows: int, n_cols: int) -> sp.csr_matrix:
    trip = list(triplets)
    if not trip:
        return sp.csr_matrix((n_rows, n_cols))
    r, c, v = zip(*trip)
    return from_coo(r, c, v, (n_rows, n_cols))


def residual_norm(A, x, b) -> float:
    x = np.asarray(x, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.shape[1] != x.shape[0] or A.shape[0] != b.shape[0]:
        raise ValueError(f"dimension mismatch: A {A.shape}, x {x.shape}, b {b.shape}")
    return float(np.linalg.norm(A @ x - b))


def _relative(A, x, b) -> float:
    return residual_norm(A, x, b) / max(float(np.linalg.norm(b)), _TINY)


def solve_linear(A, b, tol: float = DEFAULT_TOL, method: str = "direct", maxiter: int = 2000) -> SolveReport:
    """Solve ``A x = b`` and certify ``||Ax - b|| <= tol * ||b||``.

    ``method="direct"`` uses a sparse LU factorization followed by at most two
    steps of iterative refinement. ``method="iterative"`` uses ILU-preconditioned
    GMRES. ``"auto"`` tries the direct route and falls back to GMRES (warm
    started) when the factorization is too inaccurate to meet ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = sp.csc_matrix(A)
    b = np.asarray(b, dtype=float)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"matrix must be square, got {A.shape}")
    if b.shape != (A.shape[0],):
        raise ValueError(f"rhs has shape {b.shape}, expected ({A.shape[0]},)")
    if method not in ("direct", "iterative", "auto"):
        raise ValueError(f"unknown method {method!r}")

    if method == "iterative":
        return _gmres(A, b, tol, maxiter, x0=None)
    solver = factorize(A)
    try:
        return solver(b, tol)
    except SingularMatrix:
        if method != "auto" or solver.last is None:
            raise
        return _gmres(A, b, tol, maxiter, x0=solver.last)


class factorize:
    """Reusable sparse LU with refinement and residual certification."""

    def __init__(self, A):
        self.A = sp.csc_matrix(A)
        self.last = None
        try:
            self.lu = spla.splu(self.A)
        except RuntimeError as exc:
            raise SingularMatrix(f"LU factorization failed: {exc}", float("inf")) from None

    def __call__(self, b, tol: float = DEFAULT_TOL) -> SolveReport:
        A, lu = self.A, self.lu
        b = np.asarray(b, dtype=float)
        x = lu.solve(b)
        if not np.all(np.isfinite(x)):
            raise SingularMatrix("LU produced non-finite values", float("inf"))
        res = _relative(A, x, b)
        for _ in range(2):
            if res <= 16 * np.finfo(float).eps:
                break
            x_new = x + lu.solve(b - A @ x)
            res_new = _relative(A, x_new, b)
            if not res_new < res:
                break
            x, res = x_new, res_new
        self.last = x
        if res > tol:
            raise SingularMatrix("direct solve could not reach tolerance", res)
        return SolveReport(x, res, "splu")


def _gmres(A, b, tol, maxiter, x0) -> SolveReport:
    try:
        ilu = spla.spilu(A, drop_tol=1e-5, fill_factor=20)
        M = spla.LinearOperator(A.shape, ilu.solve)
    except RuntimeError:
        M = None
    x, info = spla.gmres(A, b, x0=x0, rtol=tol * 0.1, atol=0.0, restart=100, maxiter=maxiter, M=M)
    res = _relative(A, x, b)
    if info != 0 or res > tol:
        raise NoConvergence(f"GMRES stopped with info={info}", res)
    return SolveReport(x, res, "gmres+ilu")
