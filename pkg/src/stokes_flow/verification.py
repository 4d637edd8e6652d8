"""Discrete L2 errors, convergence studies and order fitting."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .grid import ScalarField

EXACT_THRESHOLD = 1e-10
CSV_COLUMNS = ("M", "dx", "E_p", "E_u", "E_v")


def fmt(x: float) -> str:
    """Round-trippable text form of a float (17 significant digits)."""
    return repr(float(x)) if np.isfinite(x) else str(float(x))


def l2_error(numeric: ScalarField, oracle) -> float:
    """RMS nodewise difference, with ``oracle(x, y)`` sampled at the field's own nodes."""
    X, Y = numeric.coords()
    ref = np.broadcast_to(np.asarray(oracle(X, Y), dtype=float), X.shape)
    return float(np.sqrt(np.mean((numeric.values - ref) ** 2)))


def fit_order(points) -> float:
    """Least-squares slope of ``log(error)`` against ``log(dx)``.

    Parameters
    ----------
    points : sequence of (dx, error)
    """
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] != 2:
        raise ValueError("fit_order needs at least 2 (dx, error) points")
    if np.any(pts <= 0) or not np.all(np.isfinite(pts)):
        raise ValueError("dx and error must be positive and finite to take logarithms")
    if np.ptp(pts[:, 0]) == 0:
        raise ValueError("fit_order needs at least two distinct dx values")
    slope, _ = np.polyfit(np.log(pts[:, 0]), np.log(pts[:, 1]), 1)
    return float(slope)


class ConvergenceFailure(RuntimeError):
    def __init__(self, M: int, cause: Exception):
        super().__init__(f"solve failed at M={M}: {cause}")
        self.M = M
        self.cause = cause


@dataclass
class ConvergenceReport:
    """Errors per resolution and fitted orders.

    ``rows`` holds ``(M, dx, E_p, E_u, E_v)`` sorted by decreasing ``dx``.
    In the exact regime (every error below ``EXACT_THRESHOLD``) orders are
    still reported but carry no information.
    """

    rows: list
    fitted_order_p: float
    fitted_order_u: float
    fitted_order_v: float
    scenario_tag: str
    method_tag: str
    exact_regime: bool = False
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_rows(cls, rows, scenario_tag: str, method_tag: str) -> "ConvergenceReport":
        rows = sorted((tuple(r) for r in rows), key=lambda r: -r[1])
        if len(rows) < 2:
            raise ValueError("a convergence report needs at least 2 resolutions")
        errs = np.array([r[2:] for r in rows], dtype=float)
        exact = bool(np.all(errs < EXACT_THRESHOLD))
        orders = []
        for k in range(3):
            col = errs[:, k]
            if np.all(col > 0):
                orders.append(fit_order([(r[1], e) for r, e in zip(rows, col)]))
            else:
                orders.append(float("nan"))
        return cls(rows, *orders, scenario_tag=scenario_tag, method_tag=method_tag, exact_regime=exact)

    @property
    def orders(self) -> tuple[float, float, float]:
        return self.fitted_order_p, self.fitted_order_u, self.fitted_order_v

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for M, dx, ep, eu, ev in self.rows:
            w.writerow([int(M), fmt(dx), fmt(ep), fmt(eu), fmt(ev)])
        return buf.getvalue()

    @staticmethod
    def rows_from_csv(text: str) -> list:
        r = csv.reader(io.StringIO(text))
        header = next(r)
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"unexpected header {header}")
        return [(int(a), float(b), float(c), float(d), float(e)) for a, b, c, d, e in r]

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario_tag,
            "method": self.method_tag,
            "exact_regime": self.exact_regime,
            "fitted_order": {"p": self.fitted_order_p, "u": self.fitted_order_u, "v": self.fitted_order_v},
            "rows": [dict(zip(CSV_COLUMNS, (int(r[0]),) + tuple(float(x) for x in r[1:]))) for r in self.rows],
        }

    def to_json(self) -> str:
        # json emits repr() of floats, which round-trips
        return json.dumps(self.to_dict(), indent=2, allow_nan=True)


def solution_errors(solution, oracle) -> tuple[float, float, float]:
    """``(E_p, E_u, E_v)`` of a Solution against ``oracle(x, y) -> (p, u, v)``."""
    out = []
    for k, f in enumerate((solution.p, solution.u, solution.v)):
        out.append(l2_error(f, lambda x, y, k=k: oracle(x, y)[k]))
    return tuple(out)


def run_convergence(method, scenario, Ms, oracle=None, **solver_kwargs) -> ConvergenceReport:
    """Solve at each ``M`` and fit orders of the three L2 errors.

    Parameters
    ----------
    method : str or callable
        Method tag (see ``solvers.METHODS``) or a solver ``f(scenario, M)``.
    oracle : callable, optional
        ``(x, y) -> (p, u, v)``; defaults to the scenario's analytic solution.
    """
    from .solvers import METHODS

    Ms = [int(m) for m in Ms]
    if len(Ms) < 2:
        raise ValueError("run_convergence needs at least 2 resolutions")
    if any(b <= a for a, b in zip(Ms, Ms[1:])):
        raise ValueError(f"Ms must be strictly increasing, got {Ms}")
    oracle = oracle or scenario.analytic
    if oracle is None:
        raise ValueError(f"scenario {scenario.name!r} has no analytic solution")
    if callable(method):
        solver, tag = method, getattr(method, "__name__", "custom")
    else:
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}")
        solver, tag = METHODS[method], method
    rows = []
    for M in Ms:
        try:
            sol = solver(scenario, M, **solver_kwargs)
        except Exception as exc:
            raise ConvergenceFailure(M, exc) from exc
        rows.append((M, sol.grid.dx, *solution_errors(sol, oracle)))
    return ConvergenceReport.from_rows(rows, scenario.name, tag)
