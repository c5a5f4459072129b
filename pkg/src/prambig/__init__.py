"""Explicit non-uniqueness examples for multidimensional phase retrieval, with numerical certificates."""

__version__ = "0.1.0"
