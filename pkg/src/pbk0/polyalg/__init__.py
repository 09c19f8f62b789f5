"""Exact polynomial arithmetic and the Gröbner kernel."""

from .api import groebner_basis, normal_form, submodule_quotient, syzygy_basis
from .field import GF, QQ, FieldSpec
from .parse import parse_polynomial
from .ring import BaseRingSpec, PolyRing, Polynomial

__all__ = [
    "BaseRingSpec",
    "FieldSpec",
    "GF",
    "PolyRing",
    "Polynomial",
    "QQ",
    "groebner_basis",
    "normal_form",
    "parse_polynomial",
    "submodule_quotient",
    "syzygy_basis",
]
