"""Exact checks of monomial deformations of Cauchy-Binet expansions."""

__version__ = "0.1.0"
