"""Exact verification and numeric continuation toolkit for the rank-4
Pfaffian system attached to Appell's F4 hypergeometric function."""

from .algebra import Polynomial, RationalFunction, VARIABLES, poly_gcd

__version__ = "0.1.0"

__all__ = ["Polynomial", "RationalFunction", "VARIABLES", "poly_gcd", "__version__"]
