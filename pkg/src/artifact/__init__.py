"""Generalized and fractional hypertree decompositions under structural restrictions."""

__version__ = "0.1.0"
