"""One-dimensional finite-difference coefficients."""

from __future__ import annotations

from math import factorial

import numpy as np


def fd_weights(z: float, xs, order: int) -> np.ndarray:
    """Weights ``w`` with ``sum(w * f(xs)) == f^(order)(z)`` for polynomials of degree < len(xs)."""
    xs = np.asarray(xs, dtype=float) - z
    n = len(xs)
    if order >= n:
        raise ValueError("need more points than the derivative order")
    V = np.vander(xs, n, increasing=True).T
    rhs = np.zeros(n)
    rhs[order] = factorial(order)
    return np.linalg.solve(V, rhs)


def centered_first(h: float) -> np.ndarray:
    """Coefficients on ``(f(x-h), f(x), f(x+h))``."""
    _check(h)
    return np.array([-1.0, 0.0, 1.0]) / (2 * h)


def centered_second(h: float) -> np.ndarray:
    _check(h)
    return np.array([1.0, -2.0, 1.0]) / h**2


def onesided_first(h: float, direction: str = "forward") -> np.ndarray:
    """Second-order one-sided first derivative.

    ``forward`` weights act on ``(f(x), f(x+h), f(x+2h))``; ``backward`` on
    ``(f(x), f(x-h), f(x-2h))``.
    """
    _check(h)
    w = np.array([-3.0, 4.0, -1.0]) / (2 * h)
    if direction == "forward":
        return w
    if direction == "backward":
        return -w
    raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")


def _check(h):
    if not h > 0:
        raise ValueError(f"spacing must be positive, got {h}")
