"""Finite-dimensional models of Dirac families and super-potentials on compact Lie groups."""

__version__ = "0.1.0"
