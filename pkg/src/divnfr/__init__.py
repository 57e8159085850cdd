"""Diverse and fair network-friendly recommendation via linear programming."""

__version__ = "0.1.0"
