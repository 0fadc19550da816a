"""Exact tools for maximal lattice-free polytopes in dimensions two and three."""

__version__ = "0.1.0"
