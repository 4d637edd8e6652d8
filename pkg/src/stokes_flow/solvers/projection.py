"""Pressure projection: explicit viscous step, pressure Poisson, correction."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..boundary import EDGES, Dirichlet
from ..grid import GridSpec, Layout, Role, ScalarField
from ..operators import (
    boundary_rows,
    laplacian_rows,
    proj_divergence_rows,
    proj_gradient_rows,
    stress_divergence,
    wall_edge,
)
from ..sparse import DEFAULT_TOL, factorize, from_coo
from .common import Solution, check_M, require_pressure_anchor, restrict_rows, scenario_grid

PRESSURE_LAPLACIANS = ("five-point", "composed")


@dataclass
class ProjectionState:
    """Velocity (on the shared velocity lattice) and pressure at time ``t``."""

    u: np.ndarray
    v: np.ndarray
    p: np.ndarray
    t: float
    dt: float
    step: int = 0
    residual: float = 0.0

    def __post_init__(self):
        _check_dt(self.dt)


class ProjectionOperators:
    """Discrete operators and the factorized pressure matrix for one grid."""

    def __init__(self, scenario, grid: GridSpec, pressure_laplacian: str = "five-point", force=None):
        if pressure_laplacian not in PRESSURE_LAPLACIANS:
            raise ValueError(f"pressure_laplacian must be one of {PRESSURE_LAPLACIANS}")
        bcs = scenario.bcs
        for r in (Role.P, Role.U, Role.V):
            bcs.require(r)
        require_pressure_anchor(bcs)
        for r in (Role.U, Role.V):
            for e in EDGES:
                if not isinstance(bcs[r, e], Dirichlet):
                    raise ValueError("the projection method needs Dirichlet velocity conditions on every wall")
        self.scenario = scenario
        self.grid = grid
        self.bcs = bcs
        self.div = proj_divergence_rows(grid, bcs)
        self.gx, self.gy = proj_gradient_rows(grid)
        self.wall = grid.on_wall(Role.U)
        X, Y = grid.coords(Role.U)
        self.f1, self.f2 = (force or scenario.force)(X, Y)
        self.u_wall = self._wall_values(Role.U)
        self.v_wall = self._wall_values(Role.V)
        if pressure_laplacian == "five-point":
            lap = laplacian_rows(grid, Role.P, bcs)
            self.lap_matrix, self.lap_shift = lap.parts[Role.P], lap.shift
            self.lap_boundary = lap.boundary
        else:
            self.lap_matrix, self.lap_shift, self.lap_boundary = self._composed()
        self.solver = factorize(self.lap_matrix)

    def _wall_values(self, role: Role) -> np.ndarray:
        M = self.grid.M
        out = np.zeros((M, M))
        X, Y = self.grid.coords(role)
        for i, j in zip(*np.nonzero(self.wall)):
            e = wall_edge(self.grid, role, self.bcs, i, j)
            out[i, j] = self.bcs[role, e](X[i, j], Y[i, j])
        return out

    def _composed(self):
        # div(grad p) from the averaged operators, Dirichlet ring rows.
        grid, M = self.grid, self.grid.M
        ring = np.zeros((M, M), dtype=bool)
        ring[[0, -1], :] = True
        ring[:, [0, -1]] = True
        edges = {}
        for i, j in zip(*np.nonzero(ring)):
            for e in EDGES:
                n = i if e.axis == 0 else j
                if n == (0 if e.low else M - 1) and isinstance(self.bcs[Role.P, e], Dirichlet):
                    edges[(i, j)] = e
                    break
        if len(edges) != ring.sum():
            raise ValueError("the composed pressure Laplacian needs Dirichlet pressure on every wall")
        DGx = self.div.parts[Role.U] @ self.gx.parts[Role.P]
        DGy = self.div.parts[Role.V] @ self.gy.parts[Role.P]
        A = restrict_rows(DGx + DGy, ~ring)
        r, c, v, rhs = boundary_rows(grid, Role.P, self.bcs, ring, edges=edges)
        A = (A + from_coo(r, c, v, (M * M, M * M))).tocsr()
        return A, -rhs.reshape(M, M, order="F"), ring

    def impose(self, u, v):
        u = np.where(self.wall, self.u_wall, u)
        v = np.where(self.wall, self.v_wall, v)
        return u, v

    def divergence(self, u, v) -> np.ndarray:
        return self.div.apply({Role.U: u, Role.V: v})


def _check_dt(dt) -> float:
    if not (isinstance(dt, (int, float)) and np.isfinite(dt) and dt > 0):
        raise ValueError(f"dt must be a positive finite number, got {dt!r}")
    return float(dt)


def projection_step(state: ProjectionState, scenario=None, force=None, ops: ProjectionOperators | None = None,
                    tol: float = DEFAULT_TOL) -> ProjectionState:
    """Advance one step of the three-stage scheme.

    Parameters
    ----------
    state : ProjectionState
    scenario : Scenario, optional
        Needed unless ``ops`` is given.
    force : ForceField, optional
        Overrides the scenario forcing.
    ops : ProjectionOperators, optional
        Prebuilt operators; reusing them skips the pressure factorization.

    Returns
    -------
    ProjectionState
        New velocity, the pressure of this step, and its solve residual in
        ``residual``.
    """
    dt = _check_dt(state.dt)
    if ops is None:
        if scenario is None:
            raise ValueError("projection_step needs a scenario or prebuilt operators")
        M = np.shape(state.u)[0]
        ops = ProjectionOperators(scenario, scenario_grid(scenario, M, Layout.PROJECTION_STAGGERED), force=force)
    elif force is not None:
        raise ValueError("pass the force when building the operators")
    a1, a2 = stress_divergence(state.u, state.v, ops.scenario.viscosity, ops.grid, ops.bcs)
    us, vs = ops.impose(state.u + dt * (a1 + ops.f1), state.v + dt * (a2 + ops.f2))
    rhs = ops.divergence(us, vs) / dt
    rhs = np.where(ops.lap_boundary, 0.0, rhs)
    b = (rhs - ops.lap_shift).ravel(order="F")
    rep = ops.solver(b, tol)
    p = rep.solution.reshape(ops.grid.M, ops.grid.M, order="F")
    px = np.nan_to_num(ops.gx.apply({Role.P: p}), nan=0.0)
    py = np.nan_to_num(ops.gy.apply({Role.P: p}), nan=0.0)
    u, v = ops.impose(us - dt * px, vs - dt * py)
    return ProjectionState(u, v, p, state.t + dt, dt, state.step + 1, rep.relative_residual)


def solve_projection(
    scenario,
    M: int,
    n_steps: int = 1,
    dt_policy="dx_squared",
    pressure_laplacian: str = "five-point",
    tol: float = DEFAULT_TOL,
) -> Solution:
    """March the projection scheme from rest for ``n_steps`` steps.

    Parameters
    ----------
    dt_policy : "dx_squared" or float
        ``"dx_squared"`` uses ``dt = dx**2``.
    pressure_laplacian : {"five-point", "composed"}
        Operator of the pressure solve. ``"composed"`` is the product of the
        averaged divergence and gradient, which has its own odd/even null
        modes in the interior.

    Returns
    -------
    Solution
        Velocity after the last step and the pressure computed in it.
    """
    M = check_M(M)
    if isinstance(n_steps, bool) or int(n_steps) != n_steps or n_steps < 1:
        raise ValueError(f"n_steps must be a positive integer, got {n_steps!r}")
    t0 = time.perf_counter()
    grid = scenario_grid(scenario, M, Layout.PROJECTION_STAGGERED)
    dt = grid.dx**2 if dt_policy == "dx_squared" else _check_dt(dt_policy)
    ops = ProjectionOperators(scenario, grid, pressure_laplacian)
    u0, v0 = ops.impose(np.zeros((M, M)), np.zeros((M, M)))
    state = ProjectionState(u0, v0, np.zeros((M, M)), 0.0, dt)
    residuals = []
    for _ in range(int(n_steps)):
        state = projection_step(state, ops=ops, tol=tol)
        residuals.append(state.residual)
    wall = time.perf_counter() - t0
    div = ops.divergence(state.u, state.v)
    return Solution(
        ScalarField(state.p, grid, Role.P),
        ScalarField(state.u, grid, Role.U),
        ScalarField(state.v, grid, Role.V),
        method_tag="projection",
        M=M,
        wall_time=wall,
        linear_residuals=residuals,
        info={"dt": dt, "n_steps": int(n_steps), "t": state.t, "max_divergence": float(np.nanmax(np.abs(div)))},
    )
