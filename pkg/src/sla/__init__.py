"""Equivariant automata over the integer atoms (Z, +1): emptiness, congruences and minimization."""

__version__ = "0.1.0"
