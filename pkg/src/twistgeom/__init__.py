"""Numerical toolkit for the minimal twist of a four-dimensional spin manifold with torsion."""

__version__ = "0.1.0"
