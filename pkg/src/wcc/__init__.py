"""Weakly constrained Eulerian-cycle codes over labeled graphs."""

__version__ = "0.1.0"
