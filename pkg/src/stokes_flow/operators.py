"""Discrete differential operators as row stencils over the lattices.

Each builder returns :class:`StencilRows`: for one target lattice, a sparse
block per source variable plus a constant shift carrying eliminated boundary
values. Applying the rows to sampled fields evaluates the operator; the same
object yields the linear-system rows for implicit solves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .boundary import EDGES, BoundarySet, Dirichlet, Edge, boundary_row, pad, resolve
from .grid import GridSpec, Layout, Role
from .sparse import from_coo


@dataclass
class StencilRow:
    target: tuple
    entries: list
    rhs_shift: float


@dataclass
class StencilRows:
    grid: GridSpec
    target: Role
    active: np.ndarray
    boundary: np.ndarray
    parts: dict
    shift: np.ndarray

    def apply(self, fields: dict) -> np.ndarray:
        """Evaluate every active row; inactive nodes come back as NaN.

        Boundary rows evaluate to their residual (zero when the field meets
        the condition).
        """
        M = self.grid.M
        out = self.shift.ravel(order="F").copy()
        for role, A in self.parts.items():
            out += A @ np.asarray(fields[role], dtype=float).ravel(order="F")
        out = out.reshape(M, M, order="F")
        out[~self.active] = np.nan
        return out

    def system(self, rhs) -> tuple[sp.csr_matrix, np.ndarray]:
        """Single-variable system ``A f = b``; ``rhs`` is ignored on boundary rows."""
        if set(self.parts) != {self.target}:
            raise ValueError("system() needs a stencil acting on its own variable only")
        if not self.active.all():
            raise ValueError("stencil does not cover every node")
        rhs = np.broadcast_to(np.asarray(rhs, dtype=float), self.active.shape).copy()
        rhs[self.boundary] = 0.0
        b = (rhs - self.shift).ravel(order="F")
        return self.parts[self.target].tocsr(), b

    def rows(self) -> list[StencilRow]:
        M = self.grid.M
        out = []
        csr = {r: A.tocsr() for r, A in self.parts.items()}
        for k in range(M * M):
            i, j = k % M, k // M
            if not self.active[i, j]:
                continue
            entries = []
            for role, A in csr.items():
                lo, hi = A.indptr[k], A.indptr[k + 1]
                for c, v in zip(A.indices[lo:hi], A.data[lo:hi]):
                    entries.append(((role, int(c % M), int(c // M)), float(v)))
            out.append(StencilRow((self.target, i, j), entries, float(self.shift[i, j])))
        return out


def _build(grid, target, terms, bcs=None, active=None, boundary=None) -> StencilRows:
    """``terms``: iterable of ``(source_role, di, dj, coef)`` applied at every active node."""
    M = grid.M
    I, J = np.meshgrid(np.arange(M), np.arange(M), indexing="ij")
    if active is None:
        active = np.ones((M, M), dtype=bool)
        if bcs is None:
            for _, di, dj, _ in terms:
                active &= (I + di >= 0) & (I + di < M) & (J + dj >= 0) & (J + dj < M)
    if boundary is None:
        boundary = np.zeros((M, M), dtype=bool)
    rows_mask = active & ~boundary
    ti, tj = I[rows_mask], J[rows_mask]
    tflat = ti + M * tj
    by_role: dict = {}
    shift = np.zeros(M * M)
    for role, di, dj, coef in terms:
        c = np.broadcast_to(np.asarray(coef, dtype=float), (M, M))[rows_mask]
        par, si, sj, w, cp, cv = resolve(grid, role, bcs, tflat, ti + di, tj + dj, c)
        np.add.at(shift, cp, cv)
        by_role.setdefault(role, []).append((par, si + M * sj, w))
    parts = {}
    for role, chunks in by_role.items():
        r = np.concatenate([c[0] for c in chunks])
        cidx = np.concatenate([c[1] for c in chunks])
        v = np.concatenate([c[2] for c in chunks])
        parts[role] = from_coo(r, cidx, v, (M * M, M * M))
    return StencilRows(grid, target, active, boundary, parts, shift.reshape(M, M, order="F"))


def _require(grid: GridSpec, layout: Layout):
    if grid.layout is not layout:
        raise ValueError(f"operator needs a {layout.value} grid, got {grid.layout.value}")


def mac_gradient_rows(grid: GridSpec, bcs: BoundarySet | None = None) -> tuple[StencilRows, StencilRows]:
    """Half-cell pressure gradient: ``p_x`` at u nodes and ``p_y`` at v nodes."""
    _require(grid, Layout.SADDLE_STAGGERED)
    h = grid.dx
    gx = _build(grid, Role.U, [(Role.P, 1, 0, 1 / h), (Role.P, 0, 0, -1 / h)], bcs)
    gy = _build(grid, Role.V, [(Role.P, 0, 1, 1 / h), (Role.P, 0, 0, -1 / h)], bcs)
    return gx, gy


def mac_divergence_rows(grid: GridSpec, bcs: BoundarySet | None = None) -> StencilRows:
    _require(grid, Layout.SADDLE_STAGGERED)
    h = grid.dx
    terms = [
        (Role.U, 0, 0, 1 / h),
        (Role.U, -1, 0, -1 / h),
        (Role.V, 0, 0, 1 / h),
        (Role.V, 0, -1, -1 / h),
    ]
    return _build(grid, Role.P, terms, bcs)


def proj_gradient_rows(grid: GridSpec, bcs: BoundarySet | None = None) -> tuple[StencilRows, StencilRows]:
    """Four-point averaged pressure gradient at the velocity nodes."""
    _require(grid, Layout.PROJECTION_STAGGERED)
    c = 0.5 / grid.dx
    gx = _build(
        grid,
        Role.U,
        [(Role.P, 1, 1, c), (Role.P, 0, 1, -c), (Role.P, 1, 0, c), (Role.P, 0, 0, -c)],
        bcs,
    )
    gy = _build(
        grid,
        Role.V,
        [(Role.P, 1, 1, c), (Role.P, 1, 0, -c), (Role.P, 0, 1, c), (Role.P, 0, 0, -c)],
        bcs,
    )
    return gx, gy


def proj_divergence_rows(grid: GridSpec, bcs: BoundarySet | None = None) -> StencilRows:
    """Four-point averaged velocity divergence at the pressure nodes."""
    _require(grid, Layout.PROJECTION_STAGGERED)
    c = 0.5 / grid.dx
    terms = [
        (Role.U, 0, 0, c),
        (Role.U, -1, 0, -c),
        (Role.U, 0, -1, c),
        (Role.U, -1, -1, -c),
        (Role.V, 0, 0, c),
        (Role.V, 0, -1, -c),
        (Role.V, -1, 0, c),
        (Role.V, -1, -1, -c),
    ]
    return _build(grid, Role.P, terms, bcs)


def centered_gradient_rows(grid: GridSpec) -> tuple[StencilRows, StencilRows]:
    """Wide centered pressure gradient on a collocated grid (interior nodes only)."""
    _require(grid, Layout.COLLOCATED)
    c = 0.5 / grid.dx
    gx = _build(grid, Role.U, [(Role.P, 1, 0, c), (Role.P, -1, 0, -c)])
    gy = _build(grid, Role.V, [(Role.P, 0, 1, c), (Role.P, 0, -1, -c)])
    return gx, gy


def centered_divergence_rows(grid: GridSpec) -> StencilRows:
    _require(grid, Layout.COLLOCATED)
    c = 0.5 / grid.dx
    terms = [(Role.U, 1, 0, c), (Role.U, -1, 0, -c), (Role.V, 0, 1, c), (Role.V, 0, -1, -c)]
    return _build(grid, Role.P, terms)


def wall_edge(grid: GridSpec, role: Role, bcs: BoundarySet, i: int, j: int) -> Edge | None:
    """Edge whose condition governs on-wall node ``(i, j)``; Dirichlet edges win at corners."""
    X, Y = grid.coords(role)
    x, y = X[i, j], Y[i, j]
    tol = 1e-9 * grid.width
    hits = []
    for e in EDGES:
        lo, hi = grid.walls(e.axis)
        pos = x if e.axis == 0 else y
        wall = lo if e.low else hi
        if abs(pos - wall) < tol:
            hits.append(e)
    if not hits:
        return None
    for e in hits:
        if isinstance(bcs[role, e], Dirichlet):
            return e
    return hits[0]


def boundary_rows(grid: GridSpec, role: Role, bcs: BoundarySet, mask: np.ndarray, edges: dict | None = None):
    """COO pieces ``(rows, cols, vals, rhs)`` of boundary equations at ``mask`` nodes.

    ``edges`` maps ``(i, j)`` to the governing edge; by default the wall the
    node lies on.
    """
    M = grid.M
    rows, cols, vals = [], [], []
    rhs = np.zeros(M * M)
    for i, j in zip(*np.nonzero(mask)):
        e = edges[(i, j)] if edges is not None else wall_edge(grid, role, bcs, i, j)
        entries, value = boundary_row(grid, role, bcs, e, int(i), int(j))
        k = i + M * j
        for (a, b), w in entries:
            rows.append(k)
            cols.append(a + M * b)
            vals.append(w)
        rhs[k] = value
    return np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64), np.array(vals), rhs


def laplacian_rows(grid: GridSpec, role: Role, bcs: BoundarySet, scale: float = 1.0) -> StencilRows:
    """Five-point Laplacian of one variable, closed by ``bcs``.

    Nodes lying on a wall become boundary rows (value for Dirichlet, one-sided
    second-order derivative for Neumann); every other node carries the 5-point
    stencil with out-of-lattice neighbours eliminated through the conditions.
    """
    bcs.require(role)
    M = grid.M
    h2 = grid.dx**2
    wall = grid.on_wall(role)
    terms = [
        (role, 1, 0, scale / h2),
        (role, -1, 0, scale / h2),
        (role, 0, 1, scale / h2),
        (role, 0, -1, scale / h2),
        (role, 0, 0, -4 * scale / h2),
    ]
    st = _build(grid, role, terms, bcs, active=np.ones((M, M), dtype=bool), boundary=wall)
    if wall.any():
        r, c, v, rhs = boundary_rows(grid, role, bcs, wall)
        B = from_coo(r, c, v, (M * M, M * M))
        st.parts[role] = (st.parts[role] + B).tocsr()
        st.shift -= rhs.reshape(M, M, order="F")
    return st


@dataclass(frozen=True)
class ViscosityField:
    fn: Callable
    constant: bool = False

    @classmethod
    def uniform(cls, mu: float) -> "ViscosityField":
        if not mu > 0:
            raise ValueError(f"viscosity must be positive, got {mu}")
        return cls(lambda x, y: np.full(np.shape(x), float(mu)), constant=True)

    def __call__(self, x, y) -> np.ndarray:
        mu = np.broadcast_to(np.asarray(self.fn(np.asarray(x, float), np.asarray(y, float)), float), np.shape(x))
        if np.any(mu <= 0) or not np.all(np.isfinite(mu)):
            raise ValueError("viscosity must be positive and finite")
        return mu

    def value(self) -> float:
        if not self.constant:
            raise ValueError("viscosity is not spatially constant")
        return float(self(np.zeros(1), np.zeros(1))[0])


def stress_divergence(u, v, mu: ViscosityField, grid: GridSpec, bcs: BoundarySet | None = None):
    """Flux-form ``div(mu (grad u + grad u^T))`` at the (shared) velocity nodes.

    ``a1 = (2 mu u_x)_x + (mu (u_y + v_x))_y`` and
    ``a2 = (mu (u_y + v_x))_x + (2 mu v_y)_y``, with fluxes and viscosity taken
    at the half-node midpoints. Neighbours outside the lattice come from
    ``bcs`` (homogeneous Dirichlet velocity by default).
    """
    if grid.layout is Layout.SADDLE_STAGGERED:
        raise ValueError("stress_divergence needs u and v on shared nodes")
    if bcs is None:
        bcs = BoundarySet.uniform(Dirichlet(0.0), roles=(Role.U, Role.V))
    u = np.asarray(getattr(u, "values", u), dtype=float)
    v = np.asarray(getattr(v, "values", v), dtype=float)
    h = grid.dx
    U = pad(u, grid, Role.U, bcs)
    V = pad(v, grid, Role.V, bcs)
    X, Y = grid.coords(Role.U)
    mu_e = mu(X + h / 2, Y)  # (i+1/2, j)
    mu_w = mu(X - h / 2, Y)
    mu_n = mu(X, Y + h / 2)
    mu_s = mu(X, Y - h / 2)
    c = (slice(1, -1), slice(1, -1))

    def sh(A, di, dj):
        M = A.shape[0] - 2
        return A[1 + di : 1 + di + M, 1 + dj : 1 + dj + M]

    # normal fluxes
    ux_e = (sh(U, 1, 0) - U[c]) / h
    ux_w = (U[c] - sh(U, -1, 0)) / h
    vy_n = (sh(V, 0, 1) - V[c]) / h
    vy_s = (V[c] - sh(V, 0, -1)) / h
    # shear at y-midpoints (i, j +- 1/2)
    uy_n = (sh(U, 0, 1) - U[c]) / h
    uy_s = (U[c] - sh(U, 0, -1)) / h
    vx_n = (sh(V, 1, 0) - sh(V, -1, 0) + sh(V, 1, 1) - sh(V, -1, 1)) / (4 * h)
    vx_s = (sh(V, 1, 0) - sh(V, -1, 0) + sh(V, 1, -1) - sh(V, -1, -1)) / (4 * h)
    # shear at x-midpoints (i +- 1/2, j)
    vx_e = (sh(V, 1, 0) - V[c]) / h
    vx_w = (V[c] - sh(V, -1, 0)) / h
    uy_e = (sh(U, 0, 1) - sh(U, 0, -1) + sh(U, 1, 1) - sh(U, 1, -1)) / (4 * h)
    uy_w = (sh(U, 0, 1) - sh(U, 0, -1) + sh(U, -1, 1) - sh(U, -1, -1)) / (4 * h)

    a1 = (2 * mu_e * ux_e - 2 * mu_w * ux_w) / h + (mu_n * (uy_n + vx_n) - mu_s * (uy_s + vx_s)) / h
    a2 = (mu_e * (uy_e + vx_e) - mu_w * (uy_w + vx_w)) / h + (2 * mu_n * vy_n - 2 * mu_s * vy_s) / h
    return a1, a2
