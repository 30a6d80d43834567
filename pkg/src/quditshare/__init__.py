"""Qudit graph states, their label calculus, and threshold secret-sharing protocols."""

__version__ = "0.1.0"
