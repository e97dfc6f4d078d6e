"""Symbolic and numerical verification of a three-component Camassa-Holm type system."""

__version__ = "0.1.0"
