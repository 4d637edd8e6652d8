"""Coupled saddle-point solve of pressure and velocity in one linear system."""

from __future__ import annotations

import time

import numpy as np
import scipy.sparse as sp

from ..boundary import EDGES, Dirichlet
from ..grid import Layout, Role, ScalarField
from ..operators import (
    boundary_rows,
    centered_divergence_rows,
    centered_gradient_rows,
    laplacian_rows,
    mac_divergence_rows,
    mac_gradient_rows,
)
from ..sparse import DEFAULT_TOL, from_coo, solve_linear
from .common import Solution, block_rows, check_M, constant_viscosity, require_pressure_anchor, scenario_grid

ROLES = (Role.P, Role.U, Role.V)
GRID_MODES = {"staggered": Layout.SADDLE_STAGGERED, "collocated": Layout.COLLOCATED}


def _ring_edges(grid, bcs) -> dict:
    """Pressure ring nodes on Dirichlet-pressure edges, mapped to that edge."""
    M = grid.M
    out = {}
    for e in EDGES:
        if not isinstance(bcs[Role.P, e], Dirichlet):
            continue
        n = 0 if e.low else M - 1
        for m in range(M):
            key = (n, m) if e.axis == 0 else (m, n)
            out.setdefault(key, e)
    return out


def _pressure_rows_staggered(grid, bcs):
    M = grid.M
    ring = _ring_edges(grid, bcs)
    mask = np.zeros((M, M), dtype=bool)
    for i, j in ring:
        mask[i, j] = True
    div = mac_divergence_rows(grid, bcs)
    blocks, shift = block_rows([div], ROLES, ~mask)
    r, c, v, rhs = boundary_rows(grid, Role.P, bcs, mask, edges=ring)
    blocks[0] = (blocks[0] + from_coo(r, c, v, (M * M, M * M))).tocsr()
    return blocks, shift.ravel(order="F"), rhs


def _pressure_rows_collocated(grid, bcs):
    M = grid.M
    wall = grid.on_wall(Role.P)
    div = centered_divergence_rows(grid)
    blocks, shift = block_rows([div], ROLES, ~wall)
    r, c, v, rhs = boundary_rows(grid, Role.P, bcs, wall)
    blocks[0] = (blocks[0] + from_coo(r, c, v, (M * M, M * M))).tocsr()
    return blocks, shift.ravel(order="F"), rhs


def assemble_saddle_point(scenario, M: int, grid_mode: str = "staggered"):
    """Assemble the coupled system ``A x = b`` for ``x = [p, u, v]``.

    Interior rows carry ``-grad p + mu lap u = -f`` and ``div u = 0``; nodes
    on a wall and pressure nodes next to a Dirichlet-pressure wall carry
    boundary equations instead.

    Returns
    -------
    A : scipy.sparse.csr_matrix
    b : ndarray
    grid : GridSpec
    """
    M = check_M(M)
    if grid_mode not in GRID_MODES:
        raise ValueError(f"grid_mode must be one of {sorted(GRID_MODES)}, got {grid_mode!r}")
    mu = constant_viscosity(scenario, "the saddle-point method")
    grid = scenario_grid(scenario, M, GRID_MODES[grid_mode])
    bcs = scenario.bcs
    for r in ROLES:
        bcs.require(r)
    require_pressure_anchor(bcs)

    if grid_mode == "staggered":
        gx, gy = mac_gradient_rows(grid)
        p_blocks, p_shift, p_rhs = _pressure_rows_staggered(grid, bcs)
    else:
        gx, gy = centered_gradient_rows(grid)
        p_blocks, p_shift, p_rhs = _pressure_rows_collocated(grid, bcs)

    rows = [p_blocks]
    b = [p_rhs - p_shift]
    for role, g, comp in ((Role.U, gx, 0), (Role.V, gy, 1)):
        lap = laplacian_rows(grid, role, bcs, scale=mu)
        interior = ~lap.boundary
        g.parts = {Role.P: -g.parts[Role.P]}
        g.shift = -g.shift
        blocks, _ = block_rows([g], ROLES, interior)
        blocks[ROLES.index(role)] = (blocks[ROLES.index(role)] + lap.parts[role]).tocsr()
        X, Y = grid.coords(role)
        f = scenario.force(X, Y)[comp]
        rhs = np.where(interior, -f, 0.0) - lap.shift - np.where(interior, g.shift, 0.0)
        rows.append(blocks)
        b.append(rhs.ravel(order="F"))
    A = sp.bmat(rows, format="csr")
    return A, np.concatenate(b), grid


def solve_saddle_point(scenario, M: int, grid_mode: str = "staggered", tol: float = DEFAULT_TOL) -> Solution:
    """Solve the steady problem as one coupled sparse system.

    Parameters
    ----------
    scenario : Scenario
        Needs a spatially constant viscosity.
    M : int
        Nodes per axis per variable.
    grid_mode : {"staggered", "collocated"}
        ``"collocated"`` places every variable on the same nodes; the pressure
        then decouples into odd and even chains and the system is singular.
    """
    t0 = time.perf_counter()
    A, b, grid = assemble_saddle_point(scenario, M, grid_mode)
    report = solve_linear(A, b, tol=tol)
    n = grid.M**2
    x = report.solution
    fields = [ScalarField(x[k * n : (k + 1) * n].reshape(grid.M, grid.M, order="F"), grid, r) for k, r in enumerate(ROLES)]
    wall = time.perf_counter() - t0
    tag = "saddle-point" if grid_mode == "staggered" else "saddle-point/collocated"
    return Solution(*fields, method_tag=tag, M=grid.M, wall_time=wall, linear_residuals=[report.relative_residual])
