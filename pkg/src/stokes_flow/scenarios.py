"""Benchmark problems: pressure-driven pipe flow and a static circular vesicle."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .boundary import EDGES, BoundarySet, Dirichlet, Edge, Neumann
from .grid import Role
from .operators import ViscosityField

# Guard against division by zero in the distance gradient.
EPS_TILDE = float(np.finfo(float).eps)


@dataclass(frozen=True)
class PipeParams:
    p0: float = 200.0
    p1: float = 100.0
    mu: float = 2.0

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")


@dataclass(frozen=True)
class VesicleParams:
    R: float = 5.0
    L: float = 5.0
    eps: Optional[float] = None
    mu: ViscosityField = field(default_factory=lambda: ViscosityField.uniform(1.0))

    def __post_init__(self):
        if not (self.R > 0 and self.L > 0):
            raise ValueError("R and L must be positive")
        if self.eps is None:
            object.__setattr__(self, "eps", self.R / 2)
        if not self.eps > 0:
            raise ValueError("eps must be positive")

    @property
    def center(self) -> tuple[float, float]:
        return self.R + self.L, 0.0


@dataclass(frozen=True)
class ForceField:
    fn: Callable

    def __call__(self, x, y):
        f1, f2 = self.fn(np.asarray(x, float), np.asarray(y, float))
        shape = np.shape(x)
        return np.broadcast_to(f1, shape).astype(float), np.broadcast_to(f2, shape).astype(float)

    @classmethod
    def zero(cls) -> "ForceField":
        return cls(lambda x, y: (np.zeros_like(x), np.zeros_like(x)))


@dataclass(frozen=True)
class Scenario:
    name: str
    width: float
    height: float
    x0: float
    y0: float
    bcs: BoundarySet
    force: ForceField
    viscosity: ViscosityField
    analytic: Optional[Callable] = None
    params: object = None


def pipe_bcs(params: PipeParams) -> BoundarySet:
    c = {
        (Role.P, Edge.LEFT): Dirichlet(params.p0),
        (Role.P, Edge.RIGHT): Dirichlet(params.p1),
        (Role.P, Edge.BOTTOM): Neumann(0.0),
        (Role.P, Edge.TOP): Neumann(0.0),
        (Role.U, Edge.LEFT): Neumann(0.0),
        (Role.U, Edge.RIGHT): Neumann(0.0),
        (Role.U, Edge.BOTTOM): Dirichlet(0.0),
        (Role.U, Edge.TOP): Dirichlet(0.0),
    }
    for e in EDGES:
        c[Role.V, e] = Dirichlet(0.0)
    return BoundarySet(c)


def pipe_analytic(params: PipeParams, x, y):
    """Closed-form pipe solution on the unit square."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    p = params.p0 + x * (params.p1 - params.p0)
    u = (params.p1 - params.p0) / (2 * params.mu) * y * (y - 1)
    return p, np.broadcast_to(u, np.broadcast(x, y).shape), np.zeros(np.broadcast(x, y).shape)


def pipe_scenario(params: PipeParams | None = None) -> Scenario:
    params = params or PipeParams()
    return Scenario(
        name="pipe",
        width=1.0,
        height=1.0,
        x0=0.0,
        y0=0.0,
        bcs=pipe_bcs(params),
        force=ForceField.zero(),
        viscosity=ViscosityField.uniform(params.mu),
        analytic=lambda x, y: pipe_analytic(params, x, y),
        params=params,
    )


def signed_distance(params: VesicleParams, x, y):
    cx, cy = params.center
    return np.hypot(np.asarray(x, float) - cx, np.asarray(y, float) - cy) - params.R


def signed_distance_gradient(params: VesicleParams, x, y):
    cx, cy = params.center
    dx = np.asarray(x, float) - cx
    dy = np.asarray(y, float) - cy
    r = np.sqrt(dx * dx + dy * dy + EPS_TILDE)
    return dx / r, dy / r


def mollified_delta(z, eps: float):
    if not eps > 0:
        raise ValueError("eps must be positive")
    z = np.asarray(z, float)
    return np.where(np.abs(z) <= eps, (1 + np.cos(np.pi * z / eps)) / (2 * eps), 0.0)


def membrane_force(params: VesicleParams, x, y):
    z = signed_distance(params, x, y)
    d = mollified_delta(z, params.eps) / params.R
    zx, zy = signed_distance_gradient(params, x, y)
    return d * zx, d * zy


def vesicle_analytic(params: VesicleParams, x, y):
    """Stationary solution (constant viscosity): zero velocity, radial pressure jump."""
    z = signed_distance(params, x, y)
    R, eps = params.R, params.eps
    band = (-1 / (2 * R)) * (1 - z / eps - np.sin(np.pi * z / eps) / np.pi)
    p = np.where(z < -eps, -1 / R, np.where(z > eps, 0.0, band))
    zero = np.zeros(np.shape(z))
    return p, zero, zero.copy()


def vesicle_scenario(params: VesicleParams | None = None, width: float = 20.0, height: float = 20.0) -> Scenario:
    params = params or VesicleParams()
    return Scenario(
        name="vesicle",
        width=width,
        height=height,
        x0=0.0,
        y0=-height / 2,
        bcs=BoundarySet.uniform(Dirichlet(0.0)),
        force=ForceField(lambda x, y: membrane_force(params, x, y)),
        viscosity=params.mu,
        analytic=(lambda x, y: vesicle_analytic(params, x, y)) if params.mu.constant else None,
        params=params,
    )


def zero_scenario(width: float = 1.0) -> Scenario:
    """Homogeneous Dirichlet box without forcing; the exact solution is zero."""
    return Scenario(
        name="zero",
        width=width,
        height=width,
        x0=0.0,
        y0=0.0,
        bcs=BoundarySet.uniform(Dirichlet(0.0)),
        force=ForceField.zero(),
        viscosity=ViscosityField.uniform(1.0),
        analytic=lambda x, y: (np.zeros(np.shape(x)),) * 3,
    )
