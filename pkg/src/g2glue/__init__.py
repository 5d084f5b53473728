"""Exact algebra for gluing G2-instantons on generalised Kummer manifolds."""

__version__ = "0.1.0"
