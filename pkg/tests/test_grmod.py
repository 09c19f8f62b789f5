import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pbk0.corpus import euler_kernel, field_ring, hyperplane_sheaf, point_sheaf, ses_corpus
from pbk0.errors import DegreeError
from pbk0.grmod import (
    apply_columns,
    GradedFreeModule,
    GradedMap,
    GradedModulePresentation,
    degree_piece,
    free_resolution,
    hilbert_function,
    is_zero_sheaf,
    kernel_of_map,
    saturate_image,
    saturated,
    short_exact_cert,
    twist,
)
from pbk0.polyalg import GF, QQ

S1 = field_ring(QQ, 1)


def pres(twists, rels, ring=S1):
    """Presentation with relation columns given as lists of strings (one per generator)."""
    vecs = []
    for col in rels:
        v = {}
        for i, s in enumerate(col):
            for e, c in ring.parse(s).terms.items():
                v[(i, e)] = c
        vecs.append(v)
    return GradedModulePresentation.from_vectors(ring, twists, vecs)


# -- twists ------------------------------------------------------------------------------


def test_twist_examples():
    S = GradedModulePresentation.free(S1, [0])
    assert list(twist(S, 1).twists) == [1]
    assert twist(twist(S, -1), 1).key() == S.key()
    M = pres([0], [["x0"]])
    M2 = twist(M, 2)
    assert list(M2.twists) == [2]
    assert list(M2.relations.source.twists) == [1]
    assert [[str(p) for p in row] for row in M2.relations.matrix] == [["x0"]]


@pytest.mark.parametrize("M", [pres([0], [["x0"]]), pres([1, 0], [["x1^2", "x0"]]), GradedModulePresentation.free(S1, [2])])
@pytest.mark.parametrize("n", [-2, 1, 3])
def test_degree_piece_commutes_with_twist(M, n):
    for d in range(-1, 4):
        assert degree_piece(twist(M, n), d).rank == degree_piece(M, d + n).rank


# -- kernels and saturation ----------------------------------------------------------------


def test_euler_kernel_on_p1():
    K, psi = euler_kernel(S1, 0)
    assert list(K.presentation.twists) == [-1]
    assert not K.presentation.rels
    (col,) = K.inclusion.columns()
    img = {k: v for k, v in col.items()}
    # the syzygy is (-x1, x0) up to sign
    assert {(p, e) for p, e in img} == {(0, (0, 1)), (1, (1, 0))}
    assert K.certificate["composite_normal_forms_zero"]


def test_kernel_of_identity_and_zero():
    F = GradedFreeModule(S1, [0])
    one = S1.field.one()
    ident = GradedMap.from_columns(F, F, [{(0, S1.zero_exp): one}])
    assert kernel_of_map(ident).presentation.rank == 0
    zero = GradedMap.from_columns(F, F, [{}])
    K = kernel_of_map(zero)
    assert K.presentation.rank == 1 and not K.presentation.rels


def test_kernel_twist_commutes():
    K0, _ = euler_kernel(S1, 0)
    K2, _ = euler_kernel(S1, 2)
    assert [a + 2 for a in K0.presentation.twists] == list(K2.presentation.twists)


@pytest.mark.parametrize(
    "gens,unit",
    [([["x0", "x1"]], True), ([["x0"]], False)],
)
def test_saturation_examples(gens, unit):
    M = pres([0], [[g] for g in gens[0]])
    N, _ = saturate_image(M)
    assert N.contains({(0, S1.zero_exp): S1.field.one()}) == unit
    if not unit:
        assert N.contains({(0, (1, 0)): S1.field.one()})


def test_saturation_of_zero_and_idempotence():
    assert saturate_image(GradedModulePresentation.free(S1, [0]))[0].gens == []
    M = pres([0], [["x0^2"], ["x0*x1"]])
    once = saturated(M)
    twice = saturated(once)
    assert once.image().equals(twice.image())
    assert once.image().contains({(0, (1, 0)): S1.field.one()})


@pytest.mark.parametrize(
    "M,zero",
    [
        (pres([0], [["x0"], ["x1"]]), True),
        (GradedModulePresentation.free(S1, [0]), False),
        (pres([0], [["x0"]]), False),
    ],
)
def test_is_zero_sheaf_examples(M, zero):
    assert is_zero_sheaf(M) == zero


# -- resolutions and degree pieces -----------------------------------------------------------


def _composites_vanish(res):
    ring = res.modules[0].ring
    for a, b in zip(res.maps, res.maps[1:]):
        if any(apply_columns(a, v, ring) for v in b):
            return False
    return True


def test_free_resolution_of_the_point_ideal():
    M = pres([0], [["x0"], ["x1"]])
    res = free_resolution(M)
    assert [sorted(F.twists) for F in res.modules] == [[0], [-1, -1], [-2]]
    assert _composites_vanish(res)


def test_free_resolution_trivial_cases():
    F = GradedModulePresentation.free(S1, [0, 3])
    assert [F_.rank for F_ in free_resolution(F).modules] == [2]
    res = free_resolution(pres([0], [["x0"]]))
    assert [list(F_.twists) for F_ in res.modules] == [[0], [-1]]


@pytest.mark.parametrize("r", [1, 2])
@pytest.mark.parametrize("fld", [QQ, GF(101)])
def test_free_resolution_exact_on_corpus_modules(r, fld):
    ring = field_ring(fld, r)
    for M in (point_sheaf(ring), hyperplane_sheaf(ring, 1), euler_kernel(ring, 1)[0].presentation):
        res = free_resolution(M)
        assert res.certificate["syzygy_containment"]
        assert _composites_vanish(res)


def test_degree_piece_examples():
    p = degree_piece(GradedModulePresentation.free(S1, [1]), 0)
    assert p.rank == 2
    assert sorted(e for _, e in p.basis) == [(0, 1), (1, 0)]
    assert degree_piece(GradedModulePresentation.free(S1, [0]), -1).rank == 0
    q = degree_piece(pres([0], [["x0"]]), 2)
    assert q.rank == 1 and q.basis[0][1] == (0, 2)


def test_degree_piece_over_polynomial_base():
    from pbk0.corpus import laurent_map
    from pbk0.polyalg import PolyRing

    ring = PolyRing(laurent_map().source, 1)
    p = degree_piece(GradedModulePresentation.free(ring, [1]), 0)
    assert p.rank == 2 and not p.presentation.rels


@pytest.mark.parametrize("r", [1, 2])
def test_hilbert_function_is_additive(r):
    for ses in ses_corpus(QQ, r):
        assert short_exact_cert(ses.A, ses.f_cols, ses.B, ses.g_cols, ses.C)["exact"]
        for d in range(0, 5):
            assert hilbert_function(ses.B, d) == hilbert_function(ses.A, d) + hilbert_function(ses.C, d)


def test_graded_map_degree_check():
    F = GradedFreeModule(S1, [0])
    G = GradedFreeModule(S1, [2])
    with pytest.raises(DegreeError):
        GradedMap(F, G, [[S1.parse("x0")]])
    GradedMap(F, G, [[S1.parse("x0*x1")]])


@settings(max_examples=25, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3))
def test_hilbert_of_line_bundle_sums(a, b):
    F = GradedModulePresentation.free(S1, [a, b])
    for d in range(0, 4):
        assert hilbert_function(F, d) == max(0, a + d + 1) + max(0, b + d + 1)
