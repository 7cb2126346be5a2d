"""Entropy accounting for exact and approximate quantum error correction."""

__version__ = "0.1.0"
