"""Pressure Poisson solve followed by two velocity Poisson solves."""

from __future__ import annotations

import time

import numpy as np

from ..grid import Layout, Role, ScalarField
from ..operators import laplacian_rows, mac_gradient_rows
from ..sparse import DEFAULT_TOL, solve_linear
from .common import Solution, check_M, constant_viscosity, require_pressure_anchor, scenario_grid


def force_divergence(scenario, grid) -> np.ndarray:
    """Second-order ``div f`` at the pressure nodes (one-sided at the ring)."""
    X, Y = grid.coords(Role.P)
    f1, f2 = scenario.force(X, Y)
    return np.gradient(f1, grid.dx, axis=0, edge_order=2) + np.gradient(f2, grid.dy, axis=1, edge_order=2)


def solve_decoupling(scenario, M: int, tol: float = DEFAULT_TOL) -> Solution:
    """Three sequential scalar solves on the staggered grid.

    Taking the divergence of the momentum balance with constant viscosity
    gives ``lap p = div f``; with ``p`` known, ``mu lap u = p_x - f1`` and
    ``mu lap v = p_y - f2`` are independent Poisson problems.
    """
    M = check_M(M)
    mu = constant_viscosity(scenario, "the decoupling method")
    t0 = time.perf_counter()
    grid = scenario_grid(scenario, M, Layout.SADDLE_STAGGERED)
    bcs = scenario.bcs
    require_pressure_anchor(bcs)
    residuals = []

    A, b = laplacian_rows(grid, Role.P, bcs).system(force_divergence(scenario, grid))
    rep = solve_linear(A, b, tol=tol)
    residuals.append(rep.relative_residual)
    p = rep.solution.reshape(M, M, order="F")

    gx, gy = mac_gradient_rows(grid)
    out = {}
    for role, g, comp in ((Role.U, gx, 0), (Role.V, gy, 1)):
        X, Y = grid.coords(role)
        f = scenario.force(X, Y)[comp]
        rhs = np.nan_to_num(g.apply({Role.P: p}) - f, nan=0.0)
        A, b = laplacian_rows(grid, role, bcs, scale=mu).system(rhs)
        rep = solve_linear(A, b, tol=tol)
        residuals.append(rep.relative_residual)
        out[role] = rep.solution.reshape(M, M, order="F")

    wall = time.perf_counter() - t0
    return Solution(
        ScalarField(p, grid, Role.P),
        ScalarField(out[Role.U], grid, Role.U),
        ScalarField(out[Role.V], grid, Role.V),
        method_tag="decoupling",
        M=M,
        wall_time=wall,
        linear_residuals=residuals,
    )
