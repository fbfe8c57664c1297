"""Monte Carlo and exact-enumeration toolkit for maximal-cluster statistics
in non-critical site percolation."""

__version__ = "0.1.0"
