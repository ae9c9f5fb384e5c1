"""Riesz products, weighted coefficient norms and small-support constructions."""

__version__ = "0.1.0"
