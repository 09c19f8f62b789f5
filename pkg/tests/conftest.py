import pytest
from hypothesis import strategies as st

from pbk0.corpus import field_ring, laurent_map
from pbk0.polyalg import GF, QQ, BaseRingSpec, PolyRing, Polynomial
from pbk0.sheafcoh import ProjBundleMap


@pytest.fixture
def P1():
    return field_ring(QQ, 1)


@pytest.fixture
def P2():
    return field_ring(QQ, 2)


@pytest.fixture
def f_laurent():
    return laurent_map(QQ)


@pytest.fixture
def bundle1(f_laurent):
    return ProjBundleMap(f_laurent, 1)


@pytest.fixture
def bundle2(f_laurent):
    return ProjBundleMap(f_laurent, 2)


def homogeneous_poly(ring, degree, coeffs):
    """Polynomial with the given coefficients on the x-monomials of ``degree``."""
    fld = ring.field
    terms = {}
    for e, c in zip(ring.x_monomials(degree), coeffs):
        c = fld.coerce(c)
        if c:
            terms[e] = c
    return Polynomial(ring, terms)


@st.composite
def homogeneous(draw, ring, degree, lo=-3, hi=3):
    n = len(ring.x_monomials(degree))
    coeffs = draw(st.lists(st.integers(lo, hi), min_size=n, max_size=n))
    return homogeneous_poly(ring, degree, coeffs)
