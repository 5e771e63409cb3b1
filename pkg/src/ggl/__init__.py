"""Computational tools for self-similar groups acting on the binary tree:
inverted orbits, permutational wreath products and extensions, a
torsion-free lift of the first Grigorchuk group, and L-presentations."""

__version__ = "0.1.0"
