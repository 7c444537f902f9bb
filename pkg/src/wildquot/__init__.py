"""Exact computations for wild C_3^2 quotient singularities in characteristic 3."""

from .ff import Field, FieldElement, make_field, sample_parameter
from .poly import Poly, PolyRing
from .parser import parse_poly

__version__ = "0.1.0"

__all__ = ["Field", "FieldElement", "make_field", "sample_parameter", "Poly", "PolyRing",
           "parse_poly", "__version__"]
