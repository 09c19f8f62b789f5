"""Certified computations with triples (F1, alpha, F2) over projective bundles and their K0 classes."""

__version__ = "0.1.0"
