"""Exact-arithmetic experiments on Devron pairs of discrete dynamical systems."""

__version__ = "0.1.0"
