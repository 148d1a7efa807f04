"""Exact and numerical tools for truncated second main theorems of holomorphic curves."""

__version__ = "0.1.0"
