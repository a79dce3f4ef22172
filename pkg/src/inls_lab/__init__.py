"""Numerical laboratory for the focusing cubic Schrodinger equation with a
radially decaying coupling |x|^(-b) in three dimensions."""

__version__ = "0.1.0"
