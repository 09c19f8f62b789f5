import pytest
from hypothesis import given, settings, strategies as st

from pbk0.corpus import base_triple, field_ring, fvector_corpus, laurent_map, line_bundle, matrix_triple, mr_triple_corpus, relation_instances
from pbk0.errors import CertificateError, NotRegularError, Pbk0Error, TwistCapExceeded, UnsupportedInstance
from pbk0.grmod import GradedModulePresentation
from pbk0.k0 import (
    K0FormalClass,
    class_invariants,
    det_invariant,
    det_text,
    eta_coerce,
    hilbert_vector,
    phi_decompose,
    rank_vector,
    regularize_class,
    roundtrip_verify,
    triangularity,
    u_map,
    v_map,
)
from pbk0.polyalg import QQ, PolyRing
from pbk0.relcat import identity_triple
from pbk0.sheafcoh import ProjBundleMap, Sheaf

f = laurent_map()
ZERO = K0FormalClass.zero(f)


def At(entry="t", n=1):
    if n == 1:
        return base_triple(f, 1, [[entry]])
    return base_triple(f, n, [[entry if i == j else "0" for j in range(n)] for i in range(n)])


def cls(T, m=1, flavor="Q"):
    return K0FormalClass.of(T, m, flavor)


def bundle(a, entry="t", r=1):
    return matrix_triple(line_bundle(PolyRing(f.source, r), a), [[entry]], ProjBundleMap(f, r))


def id_bundle(a, r=1):
    return identity_triple(Sheaf(line_bundle(PolyRing(f.source, r), a)), ProjBundleMap(f, r))


def shape(c):
    """Sorted (twists, alpha strings, multiplicity) of the terms."""
    return sorted(
        (tuple(T.left_presentation.twists), tuple(tuple(str(p) for p in row) for row in T.alpha.matrix), m)
        for T, m in c.terms
    )


# -- formal classes -------------------------------------------------------------------------


def test_terms_merge_and_cancel():
    T = At()
    assert (cls(T) + cls(T)).terms[0][1] == 2
    assert (cls(T) - cls(T)).is_zero()
    assert cls(T, 0).is_zero()


def test_flavors_do_not_mix():
    with pytest.raises(Pbk0Error):
        cls(At()) + cls(At(), flavor="He")


# -- u and v -------------------------------------------------------------------------------


def test_u_of_first_slot():
    c = u_map([cls(At()), ZERO])
    assert shape(c) == [((0,), (("t1",),), 1)]
    assert c.context.r == 1


def test_u_of_second_slot_twists_down():
    c = u_map([ZERO, cls(At())])
    assert shape(c) == [((-1,), (("t1",),), 1)]


def test_u_of_zero_vector():
    assert u_map([ZERO, ZERO, ZERO]).is_zero()


def test_u_keeps_multiplicities_and_flavor():
    c = u_map([cls(At(), -3, "He"), K0FormalClass.zero(f, "He")])
    assert c.flavor == "He" and c.terms[0][1] == -3


@pytest.mark.parametrize(
    "a,i,expected",
    [
        (0, 0, [((0,), (("t1",),), 1)]),
        (0, 1, [((0, 0), (("t1", "0"), ("0", "t1")), 1)]),
        (-1, 0, []),
    ],
)
def test_v_examples(a, i, expected):
    assert shape(v_map(cls(bundle(a)), i)) == expected


def test_v_can_insist_on_regularity():
    with pytest.raises(NotRegularError):
        v_map(cls(bundle(-2)), 0, require_regular=True)


# -- phi and regularization -----------------------------------------------------------------


def test_phi_of_o():
    w = phi_decompose(cls(bundle(0)))
    assert shape(w[0]) == [((0,), (("t1",),), 1)] and w[1].is_zero()


def test_phi_of_o1():
    w = phi_decompose(cls(bundle(1)))
    assert shape(w[0]) == [((0, 0), (("t1", "0"), ("0", "t1")), 1)]
    assert shape(w[1]) == [((0,), (("t1",),), -1)]


def test_phi_of_zero():
    w = phi_decompose(K0FormalClass.zero(ProjBundleMap(f, 1)))
    assert len(w) == 2 and all(c.is_zero() for c in w)


def test_phi_needs_mr_terms():
    with pytest.raises(NotRegularError):
        phi_decompose(cls(bundle(-1)))


@pytest.mark.parametrize(
    "r,expected",
    [
        (1, [((0,), (("1",),), 2), ((1,), (("1",),), -1)]),
        (2, [((0,), (("1",),), 3), ((1,), (("1",),), -3), ((2,), (("1",),), 1)]),
    ],
)
def test_regularize_minus_one(r, expected):
    res = regularize_class(cls(id_bundle(-1, r)))
    assert shape(res.cls) == expected
    assert res.rounds == 1 and all(c["koszul_exact"] for c in res.certificates)


def test_regularize_leaves_mr_classes_alone():
    c = cls(bundle(1)) + cls(bundle(0), -2)
    res = regularize_class(c)
    assert res.cls.same_terms(c) and res.rounds == 0


def test_regularize_respects_the_twist_cap():
    with pytest.raises(TwistCapExceeded):
        regularize_class(cls(id_bundle(-3)), max_twist=1)


@pytest.mark.parametrize("a", [-3, -2, -1])
def test_regularize_preserves_invariants(a):
    c = cls(bundle(a), 2)
    res = regularize_class(c)
    assert class_invariants(res.cls) == class_invariants(c)


# -- eta and invariants -------------------------------------------------------------------


def test_eta():
    c = cls(At())
    e = eta_coerce(c)
    assert e.flavor == "He" and e.same_terms(c)
    assert eta_coerce(ZERO).is_zero()
    d = cls(At("t^2"))
    assert eta_coerce(c + d).same_terms(eta_coerce(c) + eta_coerce(d))
    with pytest.raises(Pbk0Error):
        eta_coerce(e)


@pytest.mark.parametrize("n", range(-3, 4))
def test_hilbert_of_line_bundles_on_p1(n):
    assert hilbert_vector(Sheaf(line_bundle(field_ring(QQ, 1), n))) == [n + 1, -n]


@pytest.mark.parametrize("r", [1, 2, 3])
def test_hilbert_of_structure_sheaf(r):
    assert hilbert_vector(Sheaf(line_bundle(field_ring(QQ, r), 0))) == [1] + [0] * r


def test_hilbert_of_o1_on_p2():
    assert hilbert_vector(Sheaf(line_bundle(field_ring(QQ, 2), 1))) == [3, -3, 1]


@settings(max_examples=25, deadline=None)
@given(
    st.lists(st.integers(-3, 3), min_size=1, max_size=3, unique=True),
    st.lists(st.integers(-2, 2), min_size=3, max_size=3),
)
def test_hilbert_is_additive(twists, mults):
    ring = field_ring(QQ, 2)
    parts = [hilbert_vector(Sheaf(line_bundle(ring, a))) for a in twists]
    total = hilbert_vector(Sheaf(GradedModulePresentation.free(ring, twists)))
    assert total == [sum(p[i] for p in parts) for i in range(3)]
    c = K0FormalClass.zero(ProjBundleMap(f, 2))
    for a, m in zip(twists, mults):
        c = c + cls(id_bundle(a, 2), m)
    assert hilbert_vector(c) == [sum(m * p[i] for m, p in zip(mults, parts)) for i in range(3)]


def test_det_examples():
    assert det_invariant(cls(At(), flavor="He")) == 1
    assert det_text(det_invariant(cls(At(), 2, "He"))) == "t^2"
    assert det_invariant(cls(At("t^2"), flavor="He")) == 2
    assert det_invariant(cls(At("1"), flavor="He")) == 0
    assert det_text(0) == "1" and det_text(1) == "t"


def test_det_needs_he_flavor():
    with pytest.raises(Pbk0Error):
        det_invariant(cls(At()))


def test_det_needs_free_components():
    ring = PolyRing(f.source, None)
    P = GradedModulePresentation.from_vectors(ring, [0], [{(0, (1,)): QQ.one()}])
    T = identity_triple(P, f)
    with pytest.raises(UnsupportedInstance):
        det_invariant(cls(T, flavor="He"))


def test_det_of_triangular_matrix():
    T = base_triple(f, 2, [["t^2", "5"], ["0", "T"]])
    assert det_invariant(cls(T, flavor="He")) == 1


@pytest.mark.parametrize("inst", relation_instances(3, 20), ids=lambda i: i[0])
def test_det_respects_relations(inst):
    kind, a, b, c = inst
    he = lambda T: det_invariant(cls(T, flavor="He"))
    if kind == "compose":
        assert he(a) + he(b) == he(c)
    else:
        assert he(a) + he(c) == he(b)


# -- triangularity and round trip ---------------------------------------------------------


@pytest.mark.parametrize("r", [1, 2])
@pytest.mark.parametrize("j", [0, 1])
def test_triangularity_of_a_t_a(r, j):
    assert all(triangularity(At(), j, r).values())


def test_roundtrip_of_basis_vector():
    rep = roundtrip_verify([cls(At()), ZERO])
    assert rep.passed and rep.checks == {"a": True, "b": True, "c": True}
    assert rep.details["det_vector"] == ["t", "1"]


def test_roundtrip_of_o1_class():
    rep = roundtrip_verify(cls(bundle(1)))
    assert rep.passed
    assert rep.details["hilbert"] == rep.details["ranks"] == [2, -1]


def test_roundtrip_of_zero():
    assert roundtrip_verify([ZERO, ZERO]).passed


@pytest.mark.parametrize("r", [1, 2])
def test_roundtrip_on_corpus_vectors(r):
    for it in fvector_corpus(1, r):
        rep = roundtrip_verify(it.value)
        assert rep.passed, (it.name, rep.checks)
        assert rep.details["before"] == rep.details["after"]


def test_phi_after_u_recovers_rank_vectors():
    for it in fvector_corpus(2, 2):
        w = it.value
        assert rank_vector(phi_decompose(regularize_class(u_map(w)).cls)) == rank_vector(w)


@pytest.mark.parametrize("r", [1, 2])
def test_roundtrip_on_mr_triples(r):
    for it in mr_triple_corpus(0, r):
        assert roundtrip_verify(cls(it.value)).passed, it.name
