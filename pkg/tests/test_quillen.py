from math import comb

import pytest

from pbk0.corpus import euler_kernel, field_ring, laurent_map, line_bundle, matrix_triple, point_sheaf, sheaf_corpus
from pbk0.errors import NotRegularError
from pbk0.grmod import GradedModulePresentation
from pbk0.k0 import hilbert_vector
from pbk0.polyalg import QQ, GF, PolyRing
from pbk0.polyalg.ring import Polynomial
from pbk0.quillen import koszul_resolution, quillen_resolution, relative_quillen_resolution
from pbk0.relcat import identity_triple, zero_triple
from pbk0.sheafcoh import ProjBundleMap, Sheaf, is_mumford_regular

f = laurent_map()


def O(a, r=1, fld=QQ):
    return Sheaf(line_bundle(field_ring(fld, r), a))


def alpha_text(T):
    return [[str(p) for p in row] for row in T.alpha.matrix]


@pytest.mark.parametrize(
    "F,ranks",
    [(O(0), [1, 0]), (O(1), [2, 1]), (O(1, 2), [3, 3, 1]), (O(2), [3, 2])],
)
def test_quillen_ranks(F, ranks):
    q = quillen_resolution(F)
    assert q.ranks == ranks
    assert q.zr_zero and q.long_exact["exact"]
    assert all(s["exact"] for s in q.sequences)


def test_first_syzygy_of_o1_is_o_minus_one():
    q = quillen_resolution(O(1))
    Z0 = q.Z(0)
    assert not Z0.is_zero()
    assert hilbert_vector(Z0) == hilbert_vector(O(-1))
    assert q.Z(1).is_zero()


def test_non_regular_input_is_refused():
    with pytest.raises(NotRegularError):
        quillen_resolution(O(-1))


@pytest.mark.parametrize("item", [it for it in sheaf_corpus(0) if is_mumford_regular(it.value)], ids=lambda it: it.name)
def test_signed_ranks_are_the_hilbert_vector(item):
    # K_0 class of a regular sheaf: sum of (-1)^n [O(-n)^{T_n}]
    q = quillen_resolution(item.value)
    r = q.r
    signed = [(-1) ** n * q.ranks[n] for n in range(r + 1)]
    assert q.zr_zero
    assert signed == hilbert_vector(item.value)


# -- relative resolutions -------------------------------------------------------------------


def bundle_triple(a, entry, r=1):
    ring = PolyRing(f.source, r)
    return matrix_triple(line_bundle(ring, a), [[entry]], ProjBundleMap(f, r))


def test_relative_resolution_of_scalar_o():
    rq = relative_quillen_resolution(bundle_triple(0, "t"))
    assert rq.ranks == [(1, 1), (0, 0)]
    assert alpha_text(rq.stages[0]) == [["t1"]]
    assert all(rq.squares)


def test_relative_resolution_of_scalar_o1():
    rq = relative_quillen_resolution(bundle_triple(1, "t"))
    assert rq.ranks == [(2, 2), (1, 1)]
    assert alpha_text(rq.stages[0]) == [["t1", "0"], ["0", "t1"]]
    assert alpha_text(rq.stages[1]) == [["t1"]]
    assert all(v for v in rq.certificate.values() if isinstance(v, bool))


def test_relative_resolution_of_zero_triple():
    rq = relative_quillen_resolution(zero_triple(ProjBundleMap(f, 2)))
    assert all(s.is_zero() for s in rq.stages)


def test_relative_resolution_of_identity():
    ring = PolyRing(f.source, 2)
    K, _ = euler_kernel(ring, 1)
    rq = relative_quillen_resolution(identity_triple(Sheaf(K.presentation), ProjBundleMap(f, 2)))
    for stage in rq.stages:
        n = stage.left_presentation.rank
        assert alpha_text(stage) == [["1" if i == j else "0" for j in range(n)] for i in range(n)]


def test_relative_resolution_needs_mr():
    with pytest.raises(NotRegularError):
        relative_quillen_resolution(bundle_triple(-1, "t"))


# -- Koszul complexes ------------------------------------------------------------------------


@pytest.mark.parametrize("r", [1, 2, 3])
def test_koszul_of_structure_sheaf(r):
    k = koszul_resolution(O(0, r))
    assert [t.rank for t in k.terms] == [comb(r + 1, i) for i in range(r + 2)]
    assert [list(set(t.twists)) for t in k.terms] == [[i] for i in range(r + 2)]
    assert k.certificate["exact"]


def test_koszul_differentials_on_p1():
    k = koszul_resolution(O(0))
    S = field_ring(QQ, 1)
    d0 = sorted(str(Polynomial(S, {e: c})) for col in k.differentials[0] for (_, e), c in col.items())
    d1 = sorted(str(Polynomial(S, {e: c})) for col in k.differentials[1] for (_, e), c in col.items())
    assert d0 == ["x0", "x1"]
    assert d1 == ["-x1", "x0"] or d1 == ["-x0", "x1"]


def test_koszul_of_zero_sheaf():
    k = koszul_resolution(Sheaf(GradedModulePresentation.free(field_ring(QQ, 1), [])))
    assert all(t.rank == 0 for t in k.terms) and k.certificate["exact"]


@pytest.mark.parametrize("item", sheaf_corpus(0, fields=(GF(101),), rs=(1, 2)), ids=lambda it: it.name)
def test_koszul_of_corpus_sheaves(item):
    assert koszul_resolution(item.value).certificate["exact"]


def test_koszul_of_triple_tracks_alpha():
    k = koszul_resolution(bundle_triple(1, "t", 2))
    assert k.certificate["exact"]
    assert len(k.alphas) == 4 and [len(a) for a in k.alphas] == [1, 3, 3, 1]


def test_point_sheaf_quillen():
    q = quillen_resolution(Sheaf(point_sheaf(field_ring(QQ, 2))))
    assert q.ranks == [1, 2, 1] and q.zr_zero
