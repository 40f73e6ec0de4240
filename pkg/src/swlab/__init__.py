"""Numerical laboratory for the dimensionally reduced Seiberg-Witten vortex equations."""

__version__ = "0.1.0"
