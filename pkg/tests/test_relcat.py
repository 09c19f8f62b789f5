import pytest

from pbk0.corpus import euler_kernel, field_ring, laurent_map, line_bundle, matrix_triple, mr_triple_corpus, scalar_matrix
from pbk0.errors import CertificateError, NotRegularError, Pbk0Error, TripleError
from pbk0.grmod import GradedFreeModule, GradedMap, GradedModulePresentation
from pbk0.k0 import pullback_to_bundle
from pbk0.polyalg import QQ, BaseRingSpec, PolyRing
from pbk0.relcat import (
    identity_triple,
    is_mr_triple,
    make_morphism,
    pushforward_alpha,
    sequence_exact,
    triple_cokernel,
    triple_kernel,
    validate_triple,
    zero_triple,
)
from pbk0.sheafcoh import BaseMap, ProjBundleMap, Sheaf, epsilon_map, is_vector_bundle

A = BaseRingSpec(QQ, ("t1",))
f = laurent_map()
P1 = ProjBundleMap(f, 1)
RA = PolyRing(A, 1)
RB = PolyRing(f.target, 1)


def base_free(n, base=A):
    return GradedModulePresentation.free(PolyRing(base, None), [0] * n)


def id_map(P):
    one = P.ring.field.one()
    return GradedMap.from_columns(P.generators, P.generators, [{(j, P.ring.zero_exp): one} for j in range(P.rank)])


def mat(src_twists, tgt_twists, rows, ring=RA):
    return GradedMap(GradedFreeModule(ring, src_twists), GradedFreeModule(ring, tgt_twists), [[ring.parse(s) for s in row] for row in rows])


def O(a):
    return Sheaf(line_bundle(RA, a))


def test_t_is_an_isomorphism_over_the_localization():
    T = validate_triple(base_free(1), mat([0], [0], [["t"]], PolyRing(f.target, None)), base_free(1), f)
    assert T.certificate["alpha_cokernel_zero"]


def test_t_is_not_an_isomorphism_over_the_identity():
    g = BaseMap.identity(A)
    with pytest.raises(TripleError) as e:
        validate_triple(base_free(1), mat([0], [0], [["t"]], PolyRing(A, None)), base_free(1), g)
    assert e.value.reason == "cokernel"


@pytest.mark.parametrize("X", [O(0), O(2), Sheaf(euler_kernel(RA, 1)[0].presentation)])
def test_identity_is_valid(X):
    T = identity_triple(X, P1)
    assert T.certificate["alpha_kernel_zero"]


def test_degree_mismatch_is_rejected():
    with pytest.raises(TripleError) as e:
        validate_triple(O(0), mat([0], [0], [["1"]], RB), O(1), P1)
    assert e.value.reason == "degree"


def test_non_injective_alpha_is_rejected():
    with pytest.raises(TripleError) as e:
        validate_triple(Sheaf(GradedModulePresentation.free(RA, [0, 0])), mat([0, 0], [0], [["1", "1"]], RB), O(0), P1)
    assert e.value.reason == "kernel"


# -- kernels, cokernels, exactness ----------------------------------------------------------


def euler_sequence():
    """0 -> O(-1) -> O^2 -> O(1) -> 0 as identity triples over P^1."""
    K, psi = euler_kernel(RA, 0)
    T1 = identity_triple(Sheaf(K.presentation), P1)
    T2 = identity_triple(Sheaf(GradedModulePresentation.free(RA, [0, 0])), P1)
    T3 = identity_triple(O(1), P1)
    m1 = make_morphism(T1, T2, K.inclusion, K.inclusion)
    m2 = make_morphism(T2, T3, psi, psi)
    return (T1, T2, T3), (m1, m2), psi


def test_euler_sequence_is_exact():
    triples, ms, _ = euler_sequence()
    cert = sequence_exact(triples, ms)
    assert cert["exact"] and cert["left"]["exact"] and cert["right"]["exact"]


def test_kernel_of_euler_map_is_minus_one():
    (_, T2, T3), _, psi = euler_sequence()
    K, inc = triple_kernel(make_morphism(T2, T3, psi, psi))
    assert list(K.left_presentation.twists) == [-1] and list(K.right_presentation.twists) == [-1]
    assert inc.certificate["square_commutes"]
    assert [[str(p) for p in row] for row in K.alpha.matrix] == [["1"]]


def test_kernel_of_identity_is_zero():
    T = identity_triple(O(1), P1)
    K, _ = triple_kernel(make_morphism(T, T, id_map(T.left_presentation), id_map(T.right_presentation)))
    assert Sheaf(K.left_presentation).is_zero() and Sheaf(K.right_presentation).is_zero()


def test_cokernel_of_zero_map_is_target():
    T = identity_triple(O(0), P1)
    T2 = matrix_triple(line_bundle(RA, 1), [["t"]], P1)
    z = mat([0], [1], [["0"]])
    C, _ = triple_cokernel(make_morphism(T, T2, z, z))
    assert C.key() == T2.key()


def test_split_sequence_is_exact():
    T = identity_triple(O(0), P1)
    Z = zero_triple(P1)
    u = id_map(T.left_presentation)
    zero = GradedMap(T.left_presentation.generators, Z.left_presentation.generators, [])
    cert = sequence_exact((T, T, Z), (make_morphism(T, T, u, u), make_morphism(T, Z, zero, zero)))
    assert cert["exact"]


def test_x0_is_a_map_but_not_an_isomorphism():
    with pytest.raises(TripleError) as e:
        validate_triple(O(0), mat([0], [1], [["x0"]], RB), O(1), P1)
    assert e.value.reason == "cokernel"


def test_x0_is_not_onto():
    T1, T2 = identity_triple(O(0), P1), identity_triple(O(1), P1)
    Z = zero_triple(P1)
    x0 = mat([0], [1], [["x0"]])
    zero = GradedMap(T2.left_presentation.generators, Z.left_presentation.generators, [])
    cert = sequence_exact((T1, T2, Z), (make_morphism(T1, T2, x0, x0), make_morphism(T2, Z, zero, zero)))
    assert not cert["exact"] and not cert["left"]["exact"]


def test_one_exact_component_is_not_enough():
    # left components carry the Euler sequence, right ones a non-surjective map
    (T1, T2, T3), (m1, m2), psi = euler_sequence()
    cert = sequence_exact((T1, T2, T3), (m1, m2))
    assert cert["exact"]
    R1 = identity_triple(O(0), P1)
    R2 = identity_triple(O(1), P1)
    Z = zero_triple(P1)
    x0 = mat([0], [1], [["x0"]])
    zero = GradedMap(R2.left_presentation.generators, Z.left_presentation.generators, [])
    mixed = sequence_exact((R1, R2, Z), (make_morphism(R1, R2, x0, x0), make_morphism(R2, Z, zero, zero)))
    assert mixed["left"]["exact"] == mixed["right"]["exact"] == mixed["exact"] is False


def test_non_commuting_square_is_rejected():
    T = identity_triple(O(0), P1)
    T2 = matrix_triple(line_bundle(RA, 0), [["t"]], P1)
    u = id_map(T.left_presentation)
    with pytest.raises(CertificateError):
        make_morphism(T, T2, u, u)


def test_exact_sequences_of_bundles_have_bundle_middle():
    (T1, T2, T3), ms, _ = euler_sequence()
    assert sequence_exact((T1, T2, T3), ms)["exact"]
    assert is_vector_bundle(T2.left, 2) and is_vector_bundle(T2.right, 2)


# -- regularity and pushforward ----------------------------------------------------------


@pytest.mark.parametrize(
    "T,expected",
    [
        (matrix_triple(line_bundle(RA, 0), [["t"]], P1), True),
        (identity_triple(O(-1), P1), False),
        (zero_triple(P1), True),
    ],
)
def test_mr_triple_examples(T, expected):
    assert is_mr_triple(T) == expected


def test_mr_needs_bundle_context():
    with pytest.raises(Pbk0Error):
        is_mr_triple(validate_triple(base_free(1), mat([0], [0], [["t"]], PolyRing(f.target, None)), base_free(1), f))


@pytest.mark.parametrize(
    "a,expected",
    [(0, [["t1"]]), (1, [["t1", "0"], ["0", "t1"]])],
)
def test_pushforward_alpha_examples(a, expected):
    T = matrix_triple(line_bundle(RA, a), [["t"]], P1)
    out = pushforward_alpha(T)
    assert out.left_presentation.rank == len(expected) and not out.left_presentation.rels
    assert [[str(p) for p in row] for row in out.alpha.matrix] == expected


def test_pushforward_of_identity_is_identity():
    out = pushforward_alpha(identity_triple(Sheaf(euler_kernel(RA, 1)[0].presentation), P1))
    n = out.left_presentation.rank
    assert [[str(p) for p in row] for row in out.alpha.matrix] == scalar_matrix(n, "1")


def test_pushforward_needs_regularity():
    with pytest.raises(NotRegularError):
        pushforward_alpha(identity_triple(O(-1), P1))


@pytest.mark.parametrize("r", [1, 2])
def test_epsilon_is_a_surjective_triple_morphism(r):
    # (eps1, eps2) from the pulled-back pushforward triple onto T, with zero cokernel
    for it in mr_triple_corpus(0, r):
        T = it.value
        push = pushforward_alpha(T)
        back = pullback_to_bundle(push, r, 0)
        e1, m1, _ = epsilon_map(T.left)
        e2, m2, _ = epsilon_map(T.right)
        if m1.key() != T.left_presentation.key() or m2.key() != T.right_presentation.key():
            continue
        e1 = GradedMap.from_columns(back.left_presentation.generators, e1.target, e1.columns())
        e2 = GradedMap.from_columns(back.right_presentation.generators, e2.target, e2.columns())
        m = make_morphism(back, T, e1, e2)
        C, _ = triple_cokernel(m)
        assert Sheaf(C.left_presentation).is_zero() and Sheaf(C.right_presentation).is_zero(), it.name
