"""Pipe pressure on collocated and staggered grids.

Prints the odd/even contrast of both pressure fields and the collocated
pressure along the centre line, where alternate columns sit on two separate
straight lines.

    python scripts/checkerboard_demo.py --M 10
"""

import argparse

from stokes_flow.scenarios import pipe_scenario
from stokes_flow.solvers import checkerboard_metric, solve_saddle_point


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--M", type=int, default=10)
    args = ap.parse_args()

    sc = pipe_scenario()
    col = solve_saddle_point(sc, args.M, grid_mode="collocated")
    stag = solve_saddle_point(sc, args.M)
    print(f"checkerboard metric  collocated {checkerboard_metric(col.p):.4f}  "
          f"staggered {checkerboard_metric(stag.p):.2e}")
    j = args.M // 2
    xs = col.p.coords()[0][:, j]
    print(f"{'x':>8}{'collocated p':>16}{'exact p':>12}")
    for x, p in zip(xs, col.p.values[:, j]):
        print(f"{x:>8.3f}{p:>16.4f}{sc.analytic(x, 0.5)[0]:>12.4f}")


if __name__ == "__main__":
    main()
