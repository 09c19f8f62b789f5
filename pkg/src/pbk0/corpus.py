"""Seeded generators for the property corpus: sheaves, sequences, triples, vectors."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .grmod import GradedFreeModule, GradedMap, GradedModulePresentation, kernel_of_map
from .k0 import K0FormalClass
from .polyalg.field import GF, QQ
from .polyalg.ring import BaseRingSpec, PolyRing
from .relcat import Triple, validate_triple
from .sheafcoh import BaseMap, ProjBundleMap, Sheaf


@dataclass
class Item:
    name: str
    value: object
    kind: str


@dataclass
class ShortExact:
    name: str
    A: GradedModulePresentation
    f_cols: list
    B: GradedModulePresentation
    g_cols: list
    C: GradedModulePresentation


def field_ring(fld, r):
    return PolyRing(BaseRingSpec(fld, (), ()), r)


def laurent_map(fld=QQ) -> BaseMap:
    """The catalog map k[t] -> k[t, t^-1]."""
    A = BaseRingSpec(fld, ("t1",), ())
    B = BaseRingSpec(fld, ("t1",), ("t1",))
    return BaseMap(A, B)


def line_bundle(ring, a):
    return GradedModulePresentation.free(ring, [a])


def euler_kernel(ring, shift=1):
    """ker(O(shift)^{r+1} -> O(shift+1)) with its defining map; shift 1 gives Omega(2)."""
    r = ring.nx - 1
    src = GradedFreeModule(ring, [shift] * (r + 1))
    tgt = GradedFreeModule(ring, [shift + 1])
    psi = GradedMap(src, tgt, [[ring.x(i) for i in range(r + 1)]])
    K = kernel_of_map(psi)
    return K, psi


def _xexp(ring, i):
    return next(iter(ring.x(i).terms))


def point_sheaf(ring, a=0):
    """S(a)/(x_1, ..., x_r): the point [1:0:...:0]."""
    return GradedModulePresentation.from_vectors(ring, [a], [{(0, _xexp(ring, i)): 1} for i in range(1, ring.nx)])


def hyperplane_sheaf(ring, a=0, i=0):
    return GradedModulePresentation.from_vectors(ring, [a], [{(0, _xexp(ring, i)): 1}])


def sheaf_corpus(seed: int = 0, fields=(QQ, GF(101)), rs=(1, 2)) -> list:
    """At least 30 sheaves over P^1 and P^2: line bundles, Euler kernels, points, random twists."""
    rng = random.Random(seed)
    items = []
    for fld in fields:
        for r in rs:
            ring = field_ring(fld, r)
            tag = f"{fld}-P{r}"
            for a in (-1, 0, 1, 2):
                items.append(Item(f"{tag}:O({a})", Sheaf(line_bundle(ring, a)), "line"))
            K, _ = euler_kernel(ring, 1)
            items.append(Item(f"{tag}:Omega(2)", Sheaf(K.presentation), "euler"))
            items.append(Item(f"{tag}:Omega(1)", Sheaf(K.presentation.twist(-1)), "euler"))
            items.append(Item(f"{tag}:point(0)", Sheaf(point_sheaf(ring, 0)), "point"))
            items.append(Item(f"{tag}:hyperplane(1)", Sheaf(hyperplane_sheaf(ring, 1)), "point"))
            a, b = rng.randint(-2, 3), rng.randint(-2, 3)
            items.append(Item(f"{tag}:O({a})+O({b})", Sheaf(GradedModulePresentation.free(ring, [a, b])), "random"))
            c = rng.randint(-1, 2)
            items.append(Item(f"{tag}:point({c})", Sheaf(point_sheaf(ring, c)), "random"))
    return items


def ses_corpus(fld=QQ, r: int = 1) -> list:
    """Short exact sequences of Mumford-regular sheaves with their maps."""
    ring = field_ring(fld, r)
    one = fld.one()
    out = []
    K, psi = euler_kernel(ring, 1)
    out.append(ShortExact(
        "euler", K.presentation, K.inclusion.columns(),
        GradedModulePresentation.free(ring, [1] * (r + 1)), psi.columns(),
        line_bundle(ring, 2),
    ))
    x0 = _xexp(ring, 0)
    for a in (0, 1):
        out.append(ShortExact(
            f"hyperplane({a})", line_bundle(ring, a), [{(0, x0): one}],
            line_bundle(ring, a + 1), [{(0, ring.zero_exp): one}],
            hyperplane_sheaf(ring, a + 1),
        ))
    z = ring.zero_exp
    out.append(ShortExact(
        "split", line_bundle(ring, 0), [{(0, z): one}],
        GradedModulePresentation.free(ring, [0, 2]), [{}, {(0, z): one}],
        line_bundle(ring, 2),
    ))
    return out


# -- triples over the Laurent map -------------------------------------------------------


def _bundle_presentation(ring_A, twists, rels=()):
    return GradedModulePresentation.from_vectors(ring_A, list(twists), list(rels))


def matrix_triple(P: GradedModulePresentation, matrix_text, context) -> Triple:
    """(P, alpha, P) with alpha given by rows of polynomial strings over the target ring."""
    f = context.base_map if isinstance(context, ProjBundleMap) else context
    ring_B = PolyRing(f.target, P.ring.r)
    F = GradedFreeModule(ring_B, list(P.twists))
    M = [[ring_B.parse(s) for s in row] for row in matrix_text]
    X = Sheaf(P) if isinstance(context, ProjBundleMap) else P
    return validate_triple(X, GradedMap(F, F, M), X, context)


def scalar_matrix(n, entry):
    return [[entry if i == j else "0" for j in range(n)] for i in range(n)]


def unimodular_2x2(rng):
    """A random invertible 2x2 matrix over k[t, t^-1] with t-power determinant."""
    m, k = rng.randint(1, 2), rng.randint(-1, 1)
    c = rng.choice(["1", "2", "t", "T"])
    shapes = [
        [[f"t^{m}", c], ["0", f"T^{m}"]],
        [["0", "1"], ["1", "0"]],
        [["1", c], ["0", "t"]],
        [[f"t^{m}", "0"], [c, "1"]],
    ]
    out = rng.choice(shapes)
    if k:
        tk = f"t^{k}" if k > 0 else "T"
        out = [[_mul(tk, e) for e in row] for row in out]
    return out


def _mul(a, b):
    if b == "0":
        return "0"
    return f"({a})*({b})"


def mr_triple_corpus(seed: int = 0, r: int = 1, fld=QQ, n: int = 10) -> list:
    """Mumford-regular triples over P^r of k[t] -> k[t, t^-1] with components from P^r_k."""
    rng = random.Random(seed)
    f = laurent_map(fld)
    ctx = ProjBundleMap(f, r)
    ring_A = PolyRing(f.source, r)
    items = []
    items.append(Item("O,t", matrix_triple(_bundle_presentation(ring_A, [0]), [["t"]], ctx), "scalar"))
    items.append(Item("O(1),t", matrix_triple(_bundle_presentation(ring_A, [1]), [["t"]], ctx), "scalar"))
    K, _ = euler_kernel(field_ring(fld, r), 1)
    Kp = _pad(K.presentation, ring_A)
    items.append(Item("Omega(2),t", matrix_triple(Kp, scalar_matrix(Kp.rank, "t"), ctx), "euler"))
    while len(items) < n:
        kind = rng.choice(["scalar", "unimodular", "sum"])
        a = rng.randint(0, 2)
        if kind == "scalar":
            m = rng.choice([-2, -1, 1, 2, 3])
            e = f"t^{m}" if m > 0 else f"T^{-m}"
            k = rng.randint(1, 2)
            items.append(Item(f"O({a})^{k},t^{m}", matrix_triple(_bundle_presentation(ring_A, [a] * k), scalar_matrix(k, e), ctx), kind))
        elif kind == "unimodular":
            U = unimodular_2x2(rng)
            items.append(Item(f"O({a})^2,U", matrix_triple(_bundle_presentation(ring_A, [a, a]), U, ctx), kind))
        else:
            b = rng.randint(0, 2)
            items.append(Item(f"O({a})+O({b}),t", matrix_triple(_bundle_presentation(ring_A, [a, b]), scalar_matrix(2, "t"), ctx), kind))
    return items


def _pad(P: GradedModulePresentation, ring):
    """Move a presentation over P^r_k to the same-shaped ring over a base with parameters."""
    pad = ring.nvars - ring.nx
    rels = [{(p, e + (0,) * pad): c for (p, e), c in v.items()} for v in P.rels]
    return GradedModulePresentation.from_vectors(ring, list(P.twists), rels)


def base_triple(f: BaseMap, n: int, matrix_text) -> Triple:
    ring = PolyRing(f.source, None)
    return matrix_triple(GradedModulePresentation.free(ring, [0] * n), matrix_text, f)


def fvector_corpus(seed: int = 0, r: int = 1, fld=QQ, n: int = 10) -> list:
    """(r+1)-vectors of classes over k[t] -> k[t, t^-1]."""
    rng = random.Random(seed)
    f = laurent_map(fld)
    zero = K0FormalClass.zero(f)
    t = base_triple(f, 1, [["t"]])
    out = []
    for j in range(r + 1):
        v = [zero] * (r + 1)
        v[j] = K0FormalClass.of(t)
        out.append(Item(f"e{j}(A,t,A)", v, "basis"))
    while len(out) < n:
        v = []
        for _ in range(r + 1):
            c = zero
            for _ in range(rng.randint(0, 2)):
                if rng.random() < 0.5:
                    m = rng.choice([-1, 1, 2])
                    T = base_triple(f, 1, [[f"t^{m}" if m > 0 else "T"]])
                else:
                    T = base_triple(f, 2, unimodular_2x2(rng))
                c = c + K0FormalClass.of(T, rng.choice([-1, 1, 2]))
            v.append(c)
        out.append(Item(f"random{len(out)}", v, "random"))
    return out


def relation_instances(seed: int = 0, count: int = 20, fld=QQ) -> list:
    """Random instances of the two relation types over k[t] -> k[t, t^-1].

    Each item is ("compose", T1, T2, T12) with T12 = beta*alpha, or
    ("extension", T', T, T'') with T block upper triangular.
    """
    rng = random.Random(seed)
    f = laurent_map(fld)
    out = []
    for k in range(count):
        n = rng.randint(1, 2)
        if k % 2 == 0:
            a = _random_unit_matrix(rng, n)
            b = _random_unit_matrix(rng, n)
            T1, T2 = base_triple(f, n, a), base_triple(f, n, b)
            T12 = base_triple(f, n, _matmul(b, a))
            out.append(("compose", T1, T2, T12))
        else:
            a, c = _random_unit_matrix(rng, 1), _random_unit_matrix(rng, n)
            g = [rng.choice(["0", "1", "t", "T", "3"]) for _ in range(n)]
            big = [[a[0][0]] + g] + [["0"] + row for row in c]
            out.append(("extension", base_triple(f, 1, a), base_triple(f, n + 1, big), base_triple(f, n, c)))
    return out


def _random_unit_matrix(rng, n):
    if n == 1:
        m = rng.randint(-2, 2)
        return [[f"t^{m}" if m >= 0 else f"T^{-m}"]]
    return unimodular_2x2(rng)


def _matmul(b, a):
    n = len(a)
    return [["+".join(f"({b[i][k]})*({a[k][j]})" for k in range(n)) for j in range(n)] for i in range(n)]

