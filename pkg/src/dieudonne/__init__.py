"""Finite flat group schemes through windows, isogeny data and frames."""

__version__ = "0.1.0"
