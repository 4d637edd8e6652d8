"""Grid geometry for the three discretization layouts.

Every variable lives on an ``M x M`` lattice. Arrays are indexed ``[i, j]``
with ``i`` along x and ``j`` along y; flattening is i-fastest, matching the
stacked unknown vector ``[p11 .. pM1 .. pMM, u11 .. , v11 ..]``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class Layout(enum.Enum):
    COLLOCATED = "collocated"
    SADDLE_STAGGERED = "saddle-staggered"
    PROJECTION_STAGGERED = "projection-staggered"


class Role(enum.Enum):
    P = "p"
    U = "u"
    V = "v"


# Lattice shift (in units of dx) of node 0 from the lower-left corner.
_SHIFTS = {
    Layout.COLLOCATED: {Role.P: (0.0, 0.0), Role.U: (0.0, 0.0), Role.V: (0.0, 0.0)},
    Layout.SADDLE_STAGGERED: {Role.P: (0.5, 0.5), Role.U: (1.0, 0.5), Role.V: (0.5, 1.0)},
    Layout.PROJECTION_STAGGERED: {Role.P: (0.5, 0.5), Role.U: (1.0, 1.0), Role.V: (1.0, 1.0)},
}


@dataclass(frozen=True)
class GridSpec:
    M: int
    width: float
    height: float
    x0: float
    y0: float
    dx: float
    dy: float
    layout: Layout

    def shift(self, role: Role) -> tuple[float, float]:
        return _SHIFTS[self.layout][role]

    def axis_coords(self, role: Role, axis: int) -> np.ndarray:
        """1D node positions of ``role`` along ``axis`` (0 = x, 1 = y)."""
        s = self.shift(role)[axis]
        origin = self.x0 if axis == 0 else self.y0
        h = self.dx if axis == 0 else self.dy
        return origin + (np.arange(self.M) + s) * h

    def walls(self, axis: int) -> tuple[float, float]:
        if axis == 0:
            return self.x0, self.x0 + self.width
        return self.y0, self.y0 + self.height

    def coords(self, role: Role) -> tuple[np.ndarray, np.ndarray]:
        """Meshgrid ``(X, Y)`` of node coordinates, indexed ``[i, j]``."""
        return np.meshgrid(self.axis_coords(role, 0), self.axis_coords(role, 1), indexing="ij")

    def on_wall(self, role: Role) -> np.ndarray:
        """Boolean ``(M, M)`` mask of nodes lying exactly on the domain boundary."""
        mask = np.zeros((self.M, self.M), dtype=bool)
        for axis in (0, 1):
            pos = self.axis_coords(role, axis)
            lo, hi = self.walls(axis)
            tol = 1e-9 * (hi - lo)
            hit = (np.abs(pos - lo) < tol) | (np.abs(pos - hi) < tol)
            if axis == 0:
                mask[hit, :] = True
            else:
                mask[:, hit] = True
        return mask


def build_grid(
    M: int,
    width: float,
    height: float,
    layout: Layout,
    x0: float = 0.0,
    y0: float = 0.0,
) -> GridSpec:
    """Construct a uniform grid with ``dx == dy``.

    Collocated grids are node-based (``dx = width / (M - 1)``); both staggered
    layouts are cell-based (``dx = width / M``).
    """
    if M < 3:
        raise ValueError(f"M must be at least 3, got {M}")
    if width <= 0 or height <= 0:
        raise ValueError("domain extents must be positive")
    if not np.isclose(width, height, rtol=1e-12, atol=0.0):
        raise ValueError(f"dx must equal dy: width={width} and height={height} differ")
    n = M - 1 if layout is Layout.COLLOCATED else M
    h = width / n
    return GridSpec(M=M, width=width, height=height, x0=x0, y0=y0, dx=h, dy=height / n, layout=layout)


def node_coords(spec: GridSpec, role: Role, i: int, j: int) -> tuple[float, float]:
    if not (0 <= i < spec.M and 0 <= j < spec.M):
        raise IndexError(f"node ({i}, {j}) outside 0..{spec.M - 1}")
    sx, sy = spec.shift(role)
    return spec.x0 + (i + sx) * spec.dx, spec.y0 + (j + sy) * spec.dy


@dataclass(frozen=True)
class IndexMap:
    """Per-role ``M x M`` tables of positions in the stacked unknown vector."""

    M: int
    roles: tuple[Role, ...]
    tables: dict

    @property
    def size(self) -> int:
        return len(self.roles) * self.M**2

    def offset(self, role: Role) -> int:
        return self.roles.index(role) * self.M**2

    def index(self, role: Role, i: int, j: int) -> int:
        return int(self.tables[role][i, j])

    def lookup(self, idx: int) -> tuple[Role, int, int]:
        if not 0 <= idx < self.size:
            raise IndexError(idx)
        k, rem = divmod(idx, self.M**2)
        j, i = divmod(rem, self.M)
        return self.roles[k], i, j

    def split(self, x: np.ndarray) -> dict:
        """Cut a stacked vector into ``(M, M)`` arrays per role."""
        M2 = self.M**2
        return {
            r: x[k * M2 : (k + 1) * M2].reshape(self.M, self.M, order="F")
            for k, r in enumerate(self.roles)
        }


def build_index_map(spec: GridSpec, roles: Sequence[Role]) -> IndexMap:
    roles = tuple(roles)
    if not roles:
        raise ValueError("roles must be non-empty")
    if len(set(roles)) != len(roles):
        raise ValueError(f"duplicate roles in {roles}")
    M = spec.M
    local = np.arange(M * M).reshape(M, M, order="F")
    tables = {r: local + k * M * M for k, r in enumerate(roles)}
    for t in tables.values():
        t.setflags(write=False)
    return IndexMap(M=M, roles=roles, tables=tables)


@dataclass
class ScalarField:
    """Values of one variable on its lattice."""

    values: np.ndarray
    grid: GridSpec
    role: Role

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.M, self.grid.M):
            raise ValueError(f"expected shape {(self.grid.M,) * 2}, got {self.values.shape}")

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        return self.grid.coords(self.role)

    @classmethod
    def sample(cls, grid: GridSpec, role: Role, fn) -> "ScalarField":
        X, Y = grid.coords(role)
        return cls(np.broadcast_to(fn(X, Y), X.shape).astype(float), grid, role)
