"""Finite-window tools for exponential partition-regular patterns."""

__version__ = "0.1.0"
