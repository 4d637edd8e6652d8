"""Shared result type and helpers for the three solution methods."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..boundary import EDGES, Dirichlet
from ..grid import GridSpec, Layout, Role, ScalarField, build_grid
from ..sparse import SingularMatrix
from ..operators import StencilRows


@dataclass
class Solution:
    """Discrete pressure and velocity with solve metadata.

    Attributes
    ----------
    p, u, v : ScalarField
        Fields on their own lattices.
    method_tag : str
        ``"saddle-point"``, ``"decoupling"`` or ``"projection"`` (collocated
        saddle-point runs are tagged ``"saddle-point/collocated"``).
    wall_time : float
        Seconds spent in assembly and solves.
    linear_residuals : list of float
        Relative residual of each linear solve, in order.
    """

    p: ScalarField
    u: ScalarField
    v: ScalarField
    method_tag: str
    M: int
    wall_time: float
    linear_residuals: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def grid(self) -> GridSpec:
        return self.p.grid

    def fields(self) -> dict:
        return {Role.P: self.p, Role.U: self.u, Role.V: self.v}


def scenario_grid(scenario, M: int, layout: Layout) -> GridSpec:
    return build_grid(M, scenario.width, scenario.height, layout, x0=scenario.x0, y0=scenario.y0)


def constant_viscosity(scenario, method: str) -> float:
    """Viscosity value, or a ValueError when it varies in space."""
    if not scenario.viscosity.constant:
        raise ValueError(
            f"{method} assumes a spatially constant viscosity; "
            "use the projection method for variable viscosity"
        )
    return scenario.viscosity.value()


def require_pressure_anchor(bcs) -> None:
    """Pressure enters only through its gradient, so some edge must fix its level.

    LU factorization does not reliably flag the constant null mode, hence the
    explicit check.
    """
    if not any(isinstance(bcs[Role.P, e], Dirichlet) for e in EDGES):
        raise SingularMatrix("no Dirichlet pressure edge: pressure is only defined up to a constant", float("inf"))


def check_M(M) -> int:
    if isinstance(M, bool) or int(M) != M or M < 3:
        raise ValueError(f"M must be an integer >= 3, got {M!r}")
    return int(M)


def restrict_rows(A, mask: np.ndarray) -> sp.csr_matrix:
    """Zero every row whose node is not in ``mask``."""
    return (sp.diags(mask.ravel(order="F").astype(float)) @ A).tocsr()


def block_rows(stencils: list[StencilRows], roles: tuple, mask: np.ndarray):
    """Stack the ``mask`` rows of several stencils into one block row.

    Returns the list of column blocks (in ``roles`` order) and the summed shift.
    """
    M = mask.shape[0]
    blocks = []
    for r in roles:
        acc = sp.csr_matrix((M * M, M * M))
        for st in stencils:
            if r in st.parts:
                acc = acc + st.parts[r]
        blocks.append(restrict_rows(acc, mask))
    shift = sum(st.shift for st in stencils) * mask
    return blocks, shift


def _detrended_contrast(p: np.ndarray, axis: int, span: float) -> float:
    q = np.moveaxis(p, axis, 0)
    if q.shape[0] < 4:  # both parities need an interior node
        return 0.0
    r = q[1:-1] - 0.5 * (q[:-2] + q[2:])
    idx = np.arange(1, q.shape[0] - 1)
    even, odd = r[idx % 2 == 0], r[idx % 2 == 1]
    return abs(even.mean() - odd.mean()) / (2 * span)


def checkerboard_metric(p) -> float:
    """Odd/even decoupling indicator of a pressure array, in ``[0, 1]``.

    The largest of the parity contrast ``|mean(p[i+j even]) - mean(p[i+j odd])|``
    and the same contrast along each axis after removing the local linear
    trend, all divided by the range of ``p``. A constant field gives 0 and
    ``(-1)**(i+j)`` gives 1.
    """
    p = np.asarray(getattr(p, "values", p), dtype=float)
    if p.ndim != 2 or min(p.shape) < 2:
        raise ValueError(f"need a 2D array with at least 2 nodes per axis, got {p.shape}")
    span = float(p.max() - p.min())
    if span == 0.0 or not np.isfinite(span):
        return 0.0
    I, J = np.indices(p.shape)
    par = (I + J) % 2 == 0
    raw = abs(p[par].mean() - p[~par].mean()) / span
    return float(min(1.0, max(raw, _detrended_contrast(p, 0, span), _detrended_contrast(p, 1, span))))
