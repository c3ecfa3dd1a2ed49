"""Biharmonic NLS exponent engine, Littlewood-Paley tools and spectral solver."""

__version__ = "0.1.0"
