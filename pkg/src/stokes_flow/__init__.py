"""Finite-difference Stokes solvers: saddle-point, decoupling and projection."""

__version__ = "0.1.0"
