"""Covariant reductions of the general quintic to the icosahedral equation and of the
general sextic to the two-parameter Valentiner problem, verified numerically."""

__version__ = "0.1.0"
