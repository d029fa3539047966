"""Exact and numerical checks for Sidon-type constants of unimodular polynomials."""

__version__ = "0.1.0"
