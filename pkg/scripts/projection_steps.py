"""Repeated projection steps on the vesicle at several time steps.

Shows how far the pressure drifts from the one-step result after ``n``
steps, and where the explicit viscous step loses stability.

    python scripts/projection_steps.py --M 50 --steps 10
"""

import argparse

import numpy as np

from stokes_flow.scenarios import vesicle_scenario
from stokes_flow.solvers import solve_projection


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--M", type=int, default=50)
    ap.add_argument("--steps", type=int, default=10)
    args = ap.parse_args()

    sc = vesicle_scenario()
    h2 = (sc.width / args.M) ** 2
    print(f"{'dt/dx^2':>8}{'max|p_n - p_1|/dx^2':>24}{'max|u_n|':>14}")
    for frac in (1.0, 0.5, 0.25, 0.125):
        one = solve_projection(sc, args.M, dt_policy=frac * h2)
        many = solve_projection(sc, args.M, n_steps=args.steps, dt_policy=frac * h2)
        gap = np.abs(many.p.values - one.p.values).max() / h2
        print(f"{frac:>8.3f}{gap:>24.4e}{np.abs(many.u.values).max():>14.4e}")


if __name__ == "__main__":
    main()
