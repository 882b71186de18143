"""Exact verification of shifted symplectic structures on linear models of
Lie n-groupoids."""

__version__ = "0.1.0"
