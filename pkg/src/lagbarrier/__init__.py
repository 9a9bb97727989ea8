"""Certified symplectic capacity bounds for Lagrangian products and holed domains."""

__version__ = "0.1.0"
