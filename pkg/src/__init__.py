"""FBSDE-based deep solvers for high-dimensional quasilinear parabolic PDEs."""

__version__ = "1.0.0"
