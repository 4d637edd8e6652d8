from .common import Solution, checkerboard_metric
from .decoupling import solve_decoupling
from .projection import ProjectionState, projection_step, solve_projection
from .saddle import assemble_saddle_point, solve_saddle_point

METHODS = {
    "saddle-point": solve_saddle_point,
    "decoupling": solve_decoupling,
    "projection": solve_projection,
}


def solve(method: str, scenario, M: int, **kwargs) -> Solution:
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {sorted(METHODS)}")
    return METHODS[method](scenario, M, **kwargs)


__all__ = [
    "METHODS",
    "ProjectionState",
    "Solution",
    "assemble_saddle_point",
    "checkerboard_metric",
    "projection_step",
    "solve",
    "solve_decoupling",
    "solve_projection",
    "solve_saddle_point",
]
