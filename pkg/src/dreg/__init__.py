"""Regularity of holonomic systems via Gröbner deformations in the Weyl algebra."""

__version__ = "0.1.0"
