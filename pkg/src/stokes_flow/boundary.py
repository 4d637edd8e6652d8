"""Boundary conditions and their elimination from stencils.

A stencil that reaches past the last lattice node is closed with a quadratic
through the wall condition and the two nearest interior nodes. The closure is
exact for quadratics, which keeps the pipe problem at round-off level error.
Nodes sitting exactly on a Dirichlet wall are replaced by the wall value.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .grid import GridSpec, Role
from .stencils import fd_weights

Value = Union[float, Callable[[np.ndarray, np.ndarray], np.ndarray]]


class Edge(enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    BOTTOM = "bottom"
    TOP = "top"

    @property
    def axis(self) -> int:
        return 0 if self in (Edge.LEFT, Edge.RIGHT) else 1

    @property
    def low(self) -> bool:
        return self in (Edge.LEFT, Edge.BOTTOM)


EDGES = (Edge.LEFT, Edge.RIGHT, Edge.BOTTOM, Edge.TOP)


@dataclass(frozen=True)
class Dirichlet:
    value: Value = 0.0

    def __call__(self, x, y):
        return _evaluate(self.value, x, y)


@dataclass(frozen=True)
class Neumann:
    """Prescribed outward normal derivative."""

    value: Value = 0.0

    def __call__(self, x, y):
        return _evaluate(self.value, x, y)


Condition = Union[Dirichlet, Neumann]


def _evaluate(value, x, y):
    x = np.asarray(x, dtype=float)
    if callable(value):
        return np.broadcast_to(value(x, np.asarray(y, dtype=float)), x.shape).astype(float)
    return np.full(x.shape, float(value))


@dataclass
class BoundarySet:
    conditions: dict = field(default_factory=dict)

    def __getitem__(self, key: tuple[Role, Edge]) -> Condition:
        try:
            return self.conditions[key]
        except KeyError:
            role, edge = key
            raise KeyError(f"no boundary condition for {role.value} on the {edge.value} edge") from None

    def require(self, role: Role) -> None:
        for e in EDGES:
            self[role, e]

    def roles(self) -> set:
        return {r for r, _ in self.conditions}

    @classmethod
    def uniform(cls, condition: Condition, roles=(Role.P, Role.U, Role.V)) -> "BoundarySet":
        return cls({(r, e): condition for r in roles for e in EDGES})


def _edge_for(axis: int, low: bool) -> Edge:
    if axis == 0:
        return Edge.LEFT if low else Edge.RIGHT
    return Edge.BOTTOM if low else Edge.TOP


def _position(grid: GridSpec, role: Role, axis: int, n):
    s = grid.shift(role)[axis]
    origin = grid.x0 if axis == 0 else grid.y0
    h = grid.dx if axis == 0 else grid.dy
    return origin + (np.asarray(n) + s) * h


def _wall_tol(grid: GridSpec) -> float:
    return 1e-9 * grid.width


def inward_nodes(grid: GridSpec, role: Role, edge: Edge, count: int) -> list[int]:
    """Indices of the ``count`` nodes nearest ``edge`` that are not on the wall."""
    wall = grid.walls(edge.axis)[0 if edge.low else 1]
    order = range(grid.M) if edge.low else range(grid.M - 1, -1, -1)
    out = []
    for n in order:
        if abs(_position(grid, role, edge.axis, n) - wall) > _wall_tol(grid):
            out.append(n)
            if len(out) == count:
                break
    return out


def closure_weights(grid: GridSpec, role: Role, edge: Edge, cond: Condition, n: int):
    """Express out-of-lattice node ``n`` as ``c0 * bc_value + sum(w_k * f[node_k])``.

    Returns ``(c0, nodes, weights)``.
    """
    axis = edge.axis
    wall = grid.walls(axis)[0 if edge.low else 1]
    tg = float(_position(grid, role, axis, n)) - wall
    if isinstance(cond, Dirichlet) and abs(tg) < _wall_tol(grid):
        return 1.0, [], np.zeros(0)
    nodes = inward_nodes(grid, role, edge, 2)
    ts = [float(_position(grid, role, axis, m)) - wall for m in nodes]
    outward = -1.0 if edge.low else 1.0
    first = [1.0, 0.0, 0.0] if isinstance(cond, Dirichlet) else [0.0, outward, 0.0]
    C = np.array([first] + [[1.0, t, t * t] for t in ts])
    w = np.linalg.solve(C.T, np.array([1.0, tg, tg * tg]))
    return w[0], nodes, w[1:]


def resolve(grid: GridSpec, role: Role, bcs: BoundarySet | None, parent, i, j, w):
    """Eliminate out-of-range lattice references.

    ``parent`` tags each entry with its originating row so constant terms can
    be accumulated. Returns ``(parent, i, j, w, const_parent, const_value)``.
    """
    parent = np.asarray(parent)
    i = np.asarray(i)
    j = np.asarray(j)
    w = np.asarray(w, dtype=float)
    c_par = [np.zeros(0, dtype=np.int64)]
    c_val = [np.zeros(0)]
    M = grid.M
    for axis in (0, 1):
        n = i if axis == 0 else j
        out = (n < 0) | (n >= M)
        if not out.any():
            continue
        if bcs is None:
            raise ValueError(f"stencil for {role.value} leaves the lattice but no boundary conditions were given")
        keep = ~out
        new_p, new_i, new_j, new_w = [parent[keep]], [i[keep]], [j[keep]], [w[keep]]
        for nval in np.unique(n[out]):
            sel = out & (n == nval)
            edge = _edge_for(axis, nval < 0)
            cond = bcs[role, edge]
            c0, nodes, weights = closure_weights(grid, role, edge, cond, int(nval))
            wall = grid.walls(axis)[0 if edge.low else 1]
            other = j[sel] if axis == 0 else i[sel]
            along = _position(grid, role, 1 - axis, other)
            bx, by = (np.full(along.shape, wall), along) if axis == 0 else (along, np.full(along.shape, wall))
            c_par.append(parent[sel])
            c_val.append(w[sel] * c0 * cond(bx, by))
            for m, wk in zip(nodes, weights):
                new_p.append(parent[sel])
                if axis == 0:
                    new_i.append(np.full(sel.sum(), m))
                    new_j.append(j[sel])
                else:
                    new_i.append(i[sel])
                    new_j.append(np.full(sel.sum(), m))
                new_w.append(w[sel] * wk)
        parent = np.concatenate(new_p)
        i = np.concatenate(new_i)
        j = np.concatenate(new_j)
        w = np.concatenate(new_w)
    return parent, i, j, w, np.concatenate(c_par), np.concatenate(c_val)


def boundary_row(grid: GridSpec, role: Role, bcs: BoundarySet, edge: Edge, i: int, j: int):
    """Equation imposing the ``edge`` condition from node ``(i, j)``.

    On-wall Dirichlet nodes get ``f = value``. Otherwise the wall value (or
    outward derivative) is reconstructed from three consecutive nodes starting
    at the given one. Returns ``(entries, rhs)`` with entries ``((i, j), w)``.
    """
    cond = bcs[role, edge]
    axis = edge.axis
    wall = grid.walls(axis)[0 if edge.low else 1]
    n0 = i if axis == 0 else j
    step = 1 if edge.low else -1
    nodes = [n0 + step * k for k in range(3)]
    pos = [float(_position(grid, role, axis, m)) for m in nodes]
    ei, ej = (wall, float(_position(grid, role, 1, j))) if axis == 0 else (float(_position(grid, role, 0, i)), wall)
    rhs = float(cond(np.array(ei), np.array(ej)))
    if isinstance(cond, Dirichlet):
        if abs(pos[0] - wall) < _wall_tol(grid):
            return [((i, j), 1.0)], rhs
        w = fd_weights(wall, pos, 0)
    else:
        outward = -1.0 if edge.low else 1.0
        w = outward * fd_weights(wall, pos, 1)
    entries = [(((m, j) if axis == 0 else (i, m)), float(wk)) for m, wk in zip(nodes, w)]
    return entries, rhs


def pad(values: np.ndarray, grid: GridSpec, role: Role, bcs: BoundarySet) -> np.ndarray:
    """Return an ``(M+2, M+2)`` copy with one ghost layer filled from ``bcs``."""
    M = grid.M
    out = np.zeros((M + 2, M + 2))
    out[1:-1, 1:-1] = values
    I, J = np.meshgrid(np.arange(-1, M + 1), np.arange(-1, M + 1), indexing="ij")
    ghost = (I < 0) | (I >= M) | (J < 0) | (J >= M)
    gi, gj = I[ghost], J[ghost]
    parent = np.arange(gi.size)
    p, ii, jj, w, cp, cv = resolve(grid, role, bcs, parent, gi, gj, np.ones(gi.size))
    acc = np.zeros(gi.size)
    np.add.at(acc, p, w * values[ii, jj])
    np.add.at(acc, cp, cv)
    out[gi + 1, gj + 1] = acc
    return out
