"""Command-line entry point: solve, converge, bench, checkerboard."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .boundary import pad
from .grid import Layout, Role
from .operators import ViscosityField
from .scenarios import PipeParams, VesicleParams, pipe_scenario, vesicle_scenario
from .verification import fmt

METHOD_NAMES = ("saddle-point", "decoupling", "projection")
SCENARIOS = ("pipe", "vesicle")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    method: str
    scenario: str
    M: int
    Ms: list
    repeats: int
    n_steps: int
    dt_policy: object
    out: Optional[str]
    format: str
    overrides: dict

    def build_scenario(self):
        o = {k: v for k, v in self.overrides.items() if v is not None}
        if self.scenario == "pipe":
            extra = set(o) - {"p0", "p1", "mu"}
            if extra:
                raise UsageError(f"pipe does not take {sorted(extra)}")
            return pipe_scenario(PipeParams(**o))
        extra = set(o) - {"R", "L", "eps", "mu"}
        if extra:
            raise UsageError(f"vesicle does not take {sorted(extra)}")
        if "mu" in o:
            o["mu"] = ViscosityField.uniform(o["mu"])
        return vesicle_scenario(VesicleParams(**o))


def _int_list(text: str) -> list:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _dt(text: str):
    if text == "dx_squared":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("dt must be 'dx_squared' or a number") from None


def _common(p: argparse.ArgumentParser, scenario: str = "vesicle"):
    p.add_argument("--scenario", choices=SCENARIOS, default=scenario)
    p.add_argument("--out", help="output file (stdout if omitted)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--steps", type=int, default=1, dest="n_steps", help="projection steps")
    p.add_argument("--dt", type=_dt, default="dx_squared", dest="dt_policy")
    p.add_argument("--seed", type=int, default=None, help="reserved; every algorithm is deterministic")
    for name in ("p0", "p1", "mu", "R", "L", "eps"):
        p.add_argument(f"--{name}", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stokes-flow", description="Steady Stokes flow solvers on a uniform grid.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    s = sub.add_parser("solve", help="solve once and write nodal fields")
    s.add_argument("--method", choices=METHOD_NAMES, default="projection")
    s.add_argument("--M", type=int, default=50)
    c = sub.add_parser("converge", help="errors and fitted orders over resolutions")
    c.add_argument("--method", choices=METHOD_NAMES, default="projection")
    c.add_argument("--Ms", type=_int_list, default=[25, 50, 75, 100])
    b = sub.add_parser("bench", help="time every method")
    b.add_argument("--Ms", type=_int_list, default=[25, 50, 75, 100, 150, 200])
    b.add_argument("--repeats", type=int, default=10)
    k = sub.add_parser("checkerboard", help="collocated vs staggered pressure contrast")
    k.add_argument("--M", type=int, default=20)
    for sp_, default in ((s, "vesicle"), (c, "vesicle"), (b, "vesicle"), (k, "pipe")):
        _common(sp_, default)
    return p


def parse_config(argv: Sequence[str]) -> RunConfig:
    ns = build_parser().parse_args(list(argv))
    cfg = RunConfig(
        command=ns.command,
        method=getattr(ns, "method", "projection"),
        scenario=ns.scenario,
        M=getattr(ns, "M", 0),
        Ms=getattr(ns, "Ms", []),
        repeats=getattr(ns, "repeats", 1),
        n_steps=ns.n_steps,
        dt_policy=ns.dt_policy,
        out=ns.out,
        format=ns.format,
        overrides={k: getattr(ns, k) for k in ("p0", "p1", "mu", "R", "L", "eps")},
    )
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    if cfg.command in ("solve", "checkerboard") and cfg.M < 3:
        raise UsageError("--M must be >= 3")
    if cfg.command in ("converge", "bench"):
        if len(cfg.Ms) < (2 if cfg.command == "converge" else 1) or min(cfg.Ms) < 3:
            raise UsageError("--Ms needs enough resolutions, each >= 3")
        if any(b <= a for a, b in zip(cfg.Ms, cfg.Ms[1:])):
            raise UsageError("--Ms must be strictly increasing")
    if cfg.repeats < 1:
        raise UsageError("--repeats must be >= 1")
    if cfg.n_steps < 1:
        raise UsageError("--steps must be >= 1")
    if not isinstance(cfg.dt_policy, str) and not cfg.dt_policy > 0:
        raise UsageError("--dt must be positive")
    if cfg.method == "projection" and cfg.scenario == "pipe" and cfg.command in ("solve", "converge"):
        raise UsageError("projection needs Dirichlet velocity walls; the pipe has outflow conditions")


def _solver_kwargs(cfg: RunConfig) -> dict:
    if cfg.method == "projection":
        return {"n_steps": cfg.n_steps, "dt_policy": cfg.dt_policy}
    return {}


def solution_table(sol, bcs):
    """Rows ``(x, y, p, u, v)`` at output nodes plus a header note.

    Output nodes are the velocity lattice on the projection layout and the
    cell centres otherwise; fields not native there are linearly interpolated.
    """
    grid = sol.grid
    target = Role.U if grid.layout is Layout.PROJECTION_STAGGERED else Role.P
    X, Y = grid.coords(target)
    pts = np.column_stack([X.ravel(order="F"), Y.ravel(order="F")])
    cols = []
    native = []
    for role, f in ((Role.P, sol.p), (Role.U, sol.u), (Role.V, sol.v)):
        xs, ys = grid.coords(role)
        if np.array_equal(xs, X) and np.array_equal(ys, Y):
            cols.append(f.values.ravel(order="F"))
            native.append(role.value)
            continue
        ax = [np.concatenate([[a[0] - h], a, [a[-1] + h]]) for a, h in
              ((grid.axis_coords(role, 0), grid.dx), (grid.axis_coords(role, 1), grid.dy))]
        interp = RegularGridInterpolator(ax, pad(f.values, grid, role, bcs))
        cols.append(interp(pts))
    note = (f"nodes: {target.value} lattice of the {grid.layout.value} grid; "
            f"native: {','.join(native)}; others linearly interpolated")
    return note, np.column_stack([pts, *cols])


def _write(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_solve(cfg: RunConfig):
    from .solvers import METHODS

    scenario = cfg.build_scenario()
    sol = METHODS[cfg.method](scenario, cfg.M, **_solver_kwargs(cfg))
    note, table = solution_table(sol, scenario.bcs)
    if cfg.format == "json":
        text = json.dumps({
            "method": sol.method_tag, "scenario": scenario.name, "M": sol.M, "note": note,
            "columns": ["x", "y", "p", "u", "v"], "rows": table.tolist(),
        }, indent=1)
    else:
        buf = io.StringIO()
        buf.write(f"# {note}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "p", "u", "v"])
        for r in table:
            w.writerow([fmt(x) for x in r])
        text = buf.getvalue()
    _write(text, cfg.out)


def cmd_converge(cfg: RunConfig):
    from .verification import run_convergence

    rep = run_convergence(cfg.method, cfg.build_scenario(), cfg.Ms, **_solver_kwargs(cfg))
    if cfg.format == "json":
        _write(rep.to_json(), cfg.out)
        return
    _write(rep.to_csv(), cfg.out)
    if cfg.out:
        Path(cfg.out).with_suffix(".json").write_text(rep.to_json())


def cmd_bench(cfg: RunConfig):
    from .bench import report_json, run_benchmark, samples_to_csv

    samples = run_benchmark(cfg.build_scenario(), cfg.Ms, cfg.repeats)
    if cfg.format == "json":
        _write(report_json(samples), cfg.out)
        return
    _write(samples_to_csv(samples), cfg.out)
    if cfg.out:
        Path(cfg.out).with_suffix(".json").write_text(report_json(samples))


def cmd_checkerboard(cfg: RunConfig):
    from .solvers import checkerboard_metric, solve_saddle_point

    scenario = cfg.build_scenario()
    res = {}
    for mode in ("collocated", "staggered"):
        sol = solve_saddle_point(scenario, cfg.M, grid_mode=mode)
        res[mode] = checkerboard_metric(sol.p)
    ratio = res["collocated"] / res["staggered"] if res["staggered"] > 0 else float("inf")
    if cfg.format == "json":
        _write(json.dumps({"M": cfg.M, "metric": res, "ratio": ratio}, indent=2) + "\n", cfg.out)
    else:
        _write(f"grid_mode,metric\ncollocated,{fmt(res['collocated'])}\nstaggered,{fmt(res['staggered'])}\n", cfg.out)


COMMANDS = {"solve": cmd_solve, "converge": cmd_converge, "bench": cmd_bench, "checkerboard": cmd_checkerboard}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv`` and dispatch; returns the process exit code."""
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"error: kind=usage message={json.dumps(str(exc))}", file=sys.stderr)
        return 2
    except Exception as exc:  # one parsable line, no traceback
        print(f"error: kind={type(exc).__name__} message={json.dumps(str(exc))}", file=sys.stderr)
        return 1
    return 0


parse_and_dispatch = main
