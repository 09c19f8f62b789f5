"""Formal classes of triples and the maps u, v, phi between the base and the bundle.

Group equality is never decided.  Classes are finite formal sums of
triples; the only tools are termwise maps, certified rewrites, and two
invariant homomorphisms (Hilbert vector and determinant).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .errors import CertificateError, NotRegularError, Pbk0Error, TwistCapExceeded, UnsupportedInstance
from .grmod import GradedFreeModule, GradedMap, GradedModulePresentation, free_resolution, hilbert_function
from .polyalg.ring import PolyRing
from .quillen import koszul_resolution, relative_quillen_resolution
from .relcat import Triple, is_mr_triple, pushforward_triple, validate_triple
from .sheafcoh import DEFAULT_MAX_TWIST, BaseMap, ProjBundleMap, Sheaf, _det

FLAVORS = ("Q", "He")


class K0FormalClass:
    """A finite formal Z-combination of triples in one context.

    Terms with the same canonical key are merged; zero triples and zero
    multiplicities are dropped.
    """

    def __init__(self, context, terms=(), flavor: str = "Q"):
        if flavor not in FLAVORS:
            raise Pbk0Error(f"unknown flavor {flavor!r}")
        self.context = context
        self.flavor = flavor
        merged = {}
        order = []
        for T, m in terms:
            if m == 0 or T.is_zero():
                continue
            k = T.key()
            if k not in merged:
                merged[k] = [T, 0]
                order.append(k)
            merged[k][1] += m
        self.terms = tuple(sorted(((merged[k][0], merged[k][1]) for k in order if merged[k][1]), key=lambda tm: tm[0].key()))

    @classmethod
    def of(cls, T: Triple, mult: int = 1, flavor: str = "Q"):
        return cls(T.context, [(T, mult)], flavor)

    @classmethod
    def zero(cls, context, flavor="Q"):
        return cls(context, [], flavor)

    @property
    def over_bundle(self) -> bool:
        return isinstance(self.context, ProjBundleMap)

    def is_zero(self) -> bool:
        return not self.terms

    def _same(self, other):
        if self.flavor != other.flavor:
            raise Pbk0Error("cannot combine classes of different flavors")

    def __add__(self, other):
        self._same(other)
        return K0FormalClass(self.context, list(self.terms) + list(other.terms), self.flavor)

    def __neg__(self):
        return K0FormalClass(self.context, [(T, -m) for T, m in self.terms], self.flavor)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, n: int):
        return K0FormalClass(self.context, [(T, n * m) for T, m in self.terms], self.flavor)

    def same_terms(self, other) -> bool:
        """Formal equality of the term multisets (not equality in K0)."""
        return [(T.key(), m) for T, m in self.terms] == [(T.key(), m) for T, m in other.terms]

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{m}*{T!r}" for T, m in self.terms)


def _sum(classes, context, flavor):
    out = K0FormalClass.zero(context, flavor)
    for c in classes:
        out = out + c
    return out


# -- u, v, eta ----------------------------------------------------------------------------


def pullback_to_bundle(T: Triple, r: int, k: int) -> Triple:
    """(pi^* V1 (-k), pi^* alpha, pi^* V2 (-k)) for a triple over the base map."""
    f = T.base_map
    ctx = ProjBundleMap(f, r)
    A_r, B_r = PolyRing(f.source, r), PolyRing(f.target, r)

    def lift(P, ring):
        pad = ring.nx
        rels = [{(p, (0,) * pad + e): c for (p, e), c in v.items()} for v in P.rels]
        return GradedModulePresentation.from_vectors(ring, [a - k for a in P.twists], rels)

    L, R = lift(T.left_presentation, A_r), lift(T.right_presentation, A_r)
    pad = B_r.nx
    cols = [{(p, (0,) * pad + e): c for (p, e), c in v.items()} for v in T.alpha.columns()]
    src = GradedFreeModule(B_r, [a - k for a in T.left_presentation.twists])
    tgt = GradedFreeModule(B_r, [a - k for a in T.right_presentation.twists])
    alpha = GradedMap.from_columns(src, tgt, cols)
    return validate_triple(Sheaf(L), alpha, Sheaf(R), ctx)


def u_map(classes, r: int | None = None) -> K0FormalClass:
    """sum_k [pi^* F_k (-k)] for an (r+1)-vector of classes over the base map."""
    classes = list(classes)
    if r is None:
        r = len(classes) - 1
    if len(classes) != r + 1:
        raise Pbk0Error("u needs a vector of length r + 1")
    f = classes[0].context
    flavor = classes[0].flavor
    ctx = ProjBundleMap(f, r)
    terms = []
    for k, c in enumerate(classes):
        if c.over_bundle:
            raise Pbk0Error("u takes classes over the base map")
        for T, m in c.terms:
            terms.append((pullback_to_bundle(T, r, k), m))
    return K0FormalClass(ctx, terms, flavor)


def v_map(c: K0FormalClass, i: int, require_regular: bool = False) -> K0FormalClass:
    """Termwise pushforward of the i-th twist."""
    if not c.over_bundle:
        raise Pbk0Error("v takes classes over a projective bundle")
    f = c.context.base_map
    terms = []
    for T, m in c.terms:
        Ti = T.twist(i)
        if require_regular and not is_mr_triple(Ti):
            raise NotRegularError("term is not Mumford-regular after twisting; regularize first")
        terms.append((pushforward_triple(Ti), m))
    return K0FormalClass(f, terms, c.flavor)


def eta_coerce(c: K0FormalClass) -> K0FormalClass:
    if c.flavor != "Q":
        raise Pbk0Error("eta starts from the Q flavor")
    return K0FormalClass(c.context, c.terms, "He")


# -- phi and regularization -------------------------------------------------------------


def phi_decompose(c: K0FormalClass, with_data: bool = False):
    """([T_0], -[T_1], ..., (-1)^r [T_r]) summed over the terms of an MR class."""
    if not c.over_bundle:
        raise Pbk0Error("phi takes classes over a projective bundle")
    r = c.context.r
    f = c.context.base_map
    slots = [[] for _ in range(r + 1)]
    data = []
    for T, m in c.terms:
        if not is_mr_triple(T):
            raise NotRegularError("phi needs Mumford-regular terms; regularize first")
        rq = relative_quillen_resolution(T, check_regular=False)
        data.append(rq)
        for k, S in enumerate(rq.stages):
            slots[k].append((S, (-1) ** k * m))
    out = [K0FormalClass(f, s, c.flavor) for s in slots]
    return (out, data) if with_data else out


@dataclass
class RegularizationResult:
    cls: K0FormalClass
    certificates: list = field(default_factory=list)
    rounds: int = 0


def regularize_class(c: K0FormalClass, max_twist: int = DEFAULT_MAX_TWIST) -> RegularizationResult:
    """Rewrite non-MR terms [F] as sum_{i=1}^{r+1} (-1)^{i-1} C(r+1, i) [F(i)] until all are MR."""
    if not c.over_bundle:
        raise Pbk0Error("regularization acts on classes over a projective bundle")
    n = c.context.r + 1
    current = c
    certs = []
    for rnd in range(max_twist + 1):
        bad = [(T, m) for T, m in current.terms if not is_mr_triple(T)]
        if not bad:
            if rnd:
                before, after = class_invariants(c), class_invariants(current)
                if before != after:
                    raise CertificateError(f"regularization changed invariants: {before} vs {after}")
            return RegularizationResult(current, certs, rnd)
        terms = [(T, m) for T, m in current.terms if is_mr_triple(T)]
        for T, m in bad:
            kz = koszul_resolution(T)
            if not kz.certificate["exact"]:
                raise Pbk0Error("Koszul certificate failed during regularization")
            certs.append({"term": T.key(), "koszul_exact": True})
            for i in range(1, n + 1):
                terms.append((T.twist(i), m * (-1) ** (i - 1) * comb(n, i)))
        current = K0FormalClass(c.context, terms, c.flavor)
    raise TwistCapExceeded(max_twist)


# -- invariants ---------------------------------------------------------------------------


def _hilbert_vector_of_presentation(P: GradedModulePresentation):
    ring = P.ring
    r = ring.r
    res = free_resolution(P)
    d0 = max([0] + [-a for F in res.modules for a in F.twists])
    samples = [(d0 + k, hilbert_function(P, d0 + k)) for k in range(r + 1)]

    def poly_at(x):
        total = Fraction(0)
        for i, (xi, yi) in enumerate(samples):
            term = Fraction(yi)
            for j, (xj, _) in enumerate(samples):
                if j != i:
                    term *= Fraction(x - xj, xi - xj)
            total += term
        return total

    values = [poly_at(d) for d in range(r + 1)]
    c = []
    for d in range(r + 1):
        acc = values[d] - sum(c[i] * _binom(d - i + r, r) for i in range(d))
        c.append(acc)
    if any(x.denominator != 1 for x in c):
        raise Pbk0Error("Hilbert vector is not integral")
    return [int(x) for x in c]


def _binom(m, r):
    """Polynomial binomial C(m, r) = m(m-1)...(m-r+1)/r!."""
    num = 1
    for j in range(r):
        num *= m - j
    den = 1
    for j in range(1, r + 1):
        den *= j
    return Fraction(num, den)


def hilbert_vector(c) -> list:
    """Coordinates (c_0..c_r) in the basis [O], [O(-1)], ..., [O(-r)].

    Accepts a Sheaf, a presentation, or a class over a projective bundle
    (evaluated on left components, meaningful for identity-alpha classes).
    """
    if isinstance(c, Sheaf):
        c = c.presentation
    if isinstance(c, GradedModulePresentation):
        if not c.ring.base.is_field:
            D = Sheaf(c).descent()
            if D is None:
                raise UnsupportedInstance("Hilbert vectors need a field base")
            c = D.presentation
        return _hilbert_vector_of_presentation(c)
    if not c.over_bundle:
        raise Pbk0Error("hilbert_vector takes sheaves or classes over a projective bundle")
    r = c.context.r
    out = [0] * (r + 1)
    for T, m in c.terms:
        for i, x in enumerate(hilbert_vector(T.left)):
            out[i] += m * x
    return out


def rank_vector(classes) -> list:
    """Signed ranks of the left components of an (r+1)-vector of base classes."""
    return [sum(m * T.left_presentation.rank for T, m in c.terms) for c in classes]


def _unit_exponent(p, f: BaseMap):
    """Exponent of the newly inverted variable in a unit c*t^m of B, modulo f(A^*)."""
    if p.is_zero() or len(p.terms) != 1:
        raise Pbk0Error(f"{p} is not a unit monomial")
    (e, _), = p.terms.items()
    ring = p.ring
    inv = f.inverted_new()
    if not inv:
        if any(e):
            raise Pbk0Error(f"{p} is not a unit")
        return 0
    v = inv[0]
    i, j = ring.index[v], ring.index[v.upper()]
    for k, a in enumerate(e):
        if a and k not in (i, j):
            raise Pbk0Error(f"{p} is not a unit")
    return e[i] - e[j]


def triple_det(T: Triple) -> int:
    """det(alpha) as an exponent m of t^m in B^*/f(A^*); needs free components."""
    L, R = T.left_presentation, T.right_presentation
    if L.rels or R.rels:
        raise UnsupportedInstance("det needs free components")
    if L.rank != R.rank:
        raise Pbk0Error("components of different ranks")
    M = T.alpha.matrix
    d = _det(M, T.alpha.ring)
    return _unit_exponent(d, T.base_map)


def det_invariant(c: K0FormalClass) -> int:
    """Product of det(alpha)^mult, returned as the exponent of t."""
    if c.flavor != "He":
        raise Pbk0Error("det is an invariant of the He flavor; apply eta_coerce first")
    return sum(m * triple_det(T) for T, m in c.terms)


def class_invariants(c: K0FormalClass) -> dict:
    """Hilbert vector and det exponent, each None where undefined."""
    out = {}
    try:
        out["hilbert"] = hilbert_vector(c)
    except UnsupportedInstance:
        out["hilbert"] = None
    try:
        out["det"] = det_invariant(eta_coerce(c) if c.flavor == "Q" else c)
    except UnsupportedInstance:
        out["det"] = None
    return out


def det_text(m: int) -> str:
    if m == 0:
        return "1"
    if m == 1:
        return "t"
    return f"t^{m}"


# -- round trip --------------------------------------------------------------------------


@dataclass
class RoundtripReport:
    checks: dict
    details: dict
    witness: str | None = None

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def _vector_invariants(w):
    he = [eta_coerce(c) if c.flavor == "Q" else c for c in w]
    return {"rank": rank_vector(w), "det": [det_invariant(c) for c in he]}


def triangularity(T: Triple, j: int, r: int) -> dict:
    """v_i(u_j(T)) for i = 0..r: zero, unit iso, or free of the expected rank."""
    U = pullback_to_bundle(T, r, j)
    out = {}
    for i in range(r + 1):
        P = pushforward_triple(U.twist(i))
        rank = T.left_presentation.rank
        if i < j:
            ok = P.is_zero()
        elif i == j:
            ok = (
                P.left_presentation.rank == rank
                and P.right_presentation.rank == T.right_presentation.rank
                and [[str(x) for x in row] for row in P.alpha.matrix] == [[str(x) for x in row] for row in T.alpha.matrix]
            )
        else:
            ok = P.left_presentation.rank == comb(r + i - j, i - j) * rank
        out[(i, j)] = ok
    return out


def roundtrip_verify(inp, context=None, max_twist: int = DEFAULT_MAX_TWIST) -> RoundtripReport:
    """Checks (a) certified relative resolutions, (b) v_i u_j triangularity, (c) invariants."""
    checks, details = {}, {}
    if isinstance(inp, K0FormalClass) and inp.over_bundle:
        c = inp
        r = c.context.r
        reg = regularize_class(c, max_twist)
        w, data = phi_decompose(reg.cls, with_data=True)
        checks["a"] = all(d.certificate["left"]["long_exact"] and d.certificate["right"]["long_exact"] and d.certificate["Z_r_zero"] for d in data)
        tri = {}
        for j, cl in enumerate(w):
            for T, _ in cl.terms:
                tri.update({f"{k}:{T.key()[:16]}": v for k, v in triangularity(T, j, r).items()})
        checks["b"] = all(tri.values())
        hv = hilbert_vector(c)
        rv = rank_vector(w)
        inv_ok = hv == rv
        details["hilbert"] = hv
        details["ranks"] = rv
        try:
            dc = det_invariant(eta_coerce(c) if c.flavor == "Q" else c)
            dw = _vector_invariants(w)["det"]
            details["det"] = dc
            details["det_vector"] = dw
            inv_ok = inv_ok and dc == sum(dw)
        except UnsupportedInstance:
            details["det"] = None
        checks["c"] = inv_ok
        return RoundtripReport(checks, details)
    w = list(inp)
    if not w:
        raise Pbk0Error("empty input vector")
    r = len(w) - 1
    c = u_map(w, r)
    reg = regularize_class(c, max_twist)
    details["regularization_rounds"] = reg.rounds
    w2, data = phi_decompose(reg.cls, with_data=True)
    checks["a"] = all(d.certificate["left"]["long_exact"] and d.certificate["right"]["long_exact"] and d.certificate["Z_r_zero"] for d in data)
    tri = {}
    for j, cl in enumerate(w):
        for T, _ in cl.terms:
            for (i, jj), ok in triangularity(T, j, r).items():
                tri[f"v{i}u{jj}"] = tri.get(f"v{i}u{jj}", True) and ok
    details["triangularity"] = tri
    checks["b"] = all(tri.values())
    before, after = _vector_invariants(w), _vector_invariants(w2)
    details["before"], details["after"] = before, after
    details["det_vector"] = [det_text(m) for m in before["det"]]
    checks["c"] = before == after
    witness = None
    if not all(checks.values()):
        witness = next(k for k, v in checks.items() if not v)
    return RoundtripReport(checks, details, witness)
