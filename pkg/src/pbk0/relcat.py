"""Triples (F1, alpha, F2) for a flat base map and their morphisms.

Over a projective bundle the components are :class:`Sheaf` objects and
alpha is a graded matrix over the pulled-back ring B[x0..xr].  Over the base
map itself the components are module presentations over A (``r = None``)
and alpha is a matrix over B.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CertificateError, LiftError, NotRegularError, Pbk0Error, TripleError, UnsupportedInstance
from .grmod import (
    GradedFreeModule,
    GradedMap,
    GradedModulePresentation,
    apply_columns,
    cokernel,
    coordinates,
    kernel_of_map,
    preimage,
    short_exact_cert,
    subquotient,
    zero_sheaf_witness,
)
from .polyalg.gb import lift
from .polyalg.ring import PolyRing
from .sheafcoh import BaseMap, ProjBundleMap, Sheaf, is_mumford_regular, pullback_presentation, pushforward_module


def presentation_of(X) -> GradedModulePresentation:
    return X.presentation if isinstance(X, Sheaf) else X


def base_map_of(context) -> BaseMap:
    return context.base_map if isinstance(context, ProjBundleMap) else context


def _wrap(P, context, like=None):
    """Re-wrap a presentation as a component of the given context."""
    if isinstance(context, ProjBundleMap):
        return Sheaf(P)
    return P


@dataclass
class Triple:
    left: object
    alpha: GradedMap
    right: object
    context: object
    certificate: dict = field(default_factory=dict)

    @property
    def left_presentation(self):
        return presentation_of(self.left)

    @property
    def right_presentation(self):
        return presentation_of(self.right)

    @property
    def over_bundle(self) -> bool:
        return isinstance(self.context, ProjBundleMap)

    @property
    def base_map(self) -> BaseMap:
        return base_map_of(self.context)

    def is_zero(self) -> bool:
        return self.left_presentation.rank == 0 and self.right_presentation.rank == 0

    def key(self) -> str:
        a = ";".join(",".join(str(p) for p in row) for row in self.alpha.matrix)
        return f"{self.left_presentation.key()}|[{a}]|{self.right_presentation.key()}"

    def twist(self, n: int) -> "Triple":
        if not self.over_bundle:
            raise Pbk0Error("only triples over a projective bundle can be twisted")
        L, R = self.left.twist(n), self.right.twist(n)
        a = GradedMap.from_columns(self.alpha.source.twist(n), self.alpha.target.twist(n), self.alpha.columns())
        return Triple(L, a, R, self.context, dict(self.certificate))

    def __repr__(self):
        return f"Triple({self.left_presentation!r}, alpha={self.alpha.matrix}, {self.right_presentation!r})"


def _pulled(P, f):
    return pullback_presentation(P, f)


def _target_ring(P, f):
    return PolyRing(f.target, P.ring.r)


def validate_triple(left, alpha, right, context) -> Triple:
    """Certify that alpha is an isomorphism after base change."""
    f = base_map_of(context)
    Lp, Rp = presentation_of(left), presentation_of(right)
    if Lp.ring.base != f.source or Rp.ring.base != f.source:
        raise TripleError("degree", None, "components must live over the source base")
    if isinstance(context, ProjBundleMap) != (Lp.ring.r is not None):
        raise TripleError("degree", None, "components do not match the context")
    L, R = _pulled(Lp, f), _pulled(Rp, f)
    if alpha.ring != L.ring:
        raise TripleError("degree", None, f"alpha lives over {alpha.ring}, expected {L.ring}")
    if alpha.source.twists != L.twists or alpha.target.twists != R.twists:
        raise TripleError("degree", None, "alpha does not match the component twists")
    cols = alpha.columns()
    rsub = R.image()
    for k, rel in enumerate(L.rels):
        if not rsub.contains(apply_columns(cols, rel, L.ring)):
            raise TripleError("not-a-map", k, f"relation {k} of the left side is not preserved")
    K = preimage(cols, R, L.pos_deg)
    sq = subquotient(L.ring, L.pos_deg, K, L.rels)
    w = zero_sheaf_witness(sq.presentation)
    if w is not None:
        raise TripleError("kernel", sq.inclusion[w], "alpha has a nonzero kernel")
    C = cokernel(R, cols)
    w = zero_sheaf_witness(C)
    if w is not None:
        raise TripleError("cokernel", w, f"alpha is not onto: generator {w} survives in the cokernel")
    cert = {"alpha_kernel_zero": True, "alpha_cokernel_zero": True}
    return Triple(left, alpha, right, context, cert)


def identity_triple(X, context) -> Triple:
    f = base_map_of(context)
    P = _pulled(presentation_of(X), f)
    one = P.ring.field.one()
    cols = [{(j, P.ring.zero_exp): one} for j in range(P.rank)]
    return validate_triple(X, GradedMap.from_columns(P.generators, P.generators, cols), X, context)


def zero_triple(context) -> Triple:
    f = base_map_of(context)
    r = context.r if isinstance(context, ProjBundleMap) else None
    P = GradedModulePresentation.free(PolyRing(f.source, r), [])
    Q = GradedModulePresentation.free(PolyRing(f.target, r), [])
    X = _wrap(P, context)
    return Triple(X, GradedMap.from_columns(Q.generators, Q.generators, []), _wrap(P, context), context, {"zero": True})


def scalar_triple(X, context, scalar_poly) -> Triple:
    """(X, c*id, X) for a degree-0 polynomial c over B."""
    f = base_map_of(context)
    P = _pulled(presentation_of(X), f)
    c = scalar_poly.map_to(PolyRing(f.target, P.ring.r))
    cols = [{(j, e): a for e, a in c.terms.items()} for j in range(P.rank)]
    return validate_triple(X, GradedMap.from_columns(P.generators, P.generators, cols), X, context)


# -- morphisms ---------------------------------------------------------------------


@dataclass
class TripleMorphism:
    source: Triple
    target: Triple
    u: GradedMap
    v: GradedMap
    certificate: dict = field(default_factory=dict)


def _respects(m: GradedMap, S: GradedModulePresentation, T: GradedModulePresentation):
    sub = T.image()
    cols = m.columns()
    return all(sub.contains(apply_columns(cols, rel, S.ring)) for rel in S.rels)


def make_morphism(source: Triple, target: Triple, u: GradedMap, v: GradedMap) -> TripleMorphism:
    """Certify that (u, v) is a morphism of triples: both maps well defined and the square commutes."""
    f = source.base_map
    SL, SR = source.left_presentation, source.right_presentation
    TL, TR = target.left_presentation, target.right_presentation
    if u.source != SL.generators or u.target != TL.generators:
        raise CertificateError("u does not match the left components")
    if v.source != SR.generators or v.target != TR.generators:
        raise CertificateError("v does not match the right components")
    if not _respects(u, SL, TL) or not _respects(v, SR, TR):
        raise CertificateError("u or v is not a map of modules")
    ring = _target_ring(SL, f)
    fu = [f.map_vec(c, SL.ring) for c in u.columns()]
    fv = [f.map_vec(c, SR.ring) for c in v.columns()]
    a, a2 = source.alpha.columns(), target.alpha.columns()
    tr = _pulled(TR, f).image()
    fld = ring.field
    for j in range(SL.rank):
        lhs = apply_columns(a2, fu[j], ring)
        rhs = apply_columns(fv, a[j], ring)
        diff = dict(lhs)
        for t, c in rhs.items():
            s = fld.sub(diff.get(t, fld.zero()), c)
            if s:
                diff[t] = s
            else:
                diff.pop(t, None)
        if tr.reduce(diff):
            raise CertificateError(f"square does not commute on generator {j}")
    return TripleMorphism(source, target, u, v, {"square_commutes": True})


def triple_kernel(m: TripleMorphism):
    """(ker u, induced alpha, ker v), with the inclusion morphism."""
    S, T = m.source, m.target
    f = S.base_map
    KU = kernel_of_map(m.u, S.left_presentation, T.left_presentation)
    KV = kernel_of_map(m.v, S.right_presentation, T.right_presentation)
    SLb = _pulled(S.left_presentation, f)
    SRb = _pulled(S.right_presentation, f)
    ring = SLb.ring
    a = S.alpha.columns()
    kv_cols = [f.map_vec(c, KV.inclusion.ring) for c in KV.inclusion.columns()]
    gens = kv_cols + SRb.rels
    gen_degs = [-t for t in KV.presentation.twists] + [_deg(v, SRb) for v in SRb.rels]
    new_cols = []
    for c in KU.inclusion.columns():
        img = apply_columns(a, f.map_vec(c, KU.inclusion.ring), ring)
        coeffs = lift(img, gens, gen_degs, SRb.pos_deg, ring)
        if coeffs is None:
            raise LiftError("alpha does not restrict to the kernels")
        col = {}
        for i, cf in enumerate(coeffs[: len(kv_cols)]):
            for e, val in cf.items():
                col[(i, e)] = val
        new_cols.append(col)
    KUb = _pulled(KU.presentation, f)
    KVb = _pulled(KV.presentation, f)
    alpha = GradedMap.from_columns(KUb.generators, KVb.generators, new_cols)
    K = validate_triple(_wrap(KU.presentation, S.context), alpha, _wrap(KV.presentation, S.context), S.context)
    inc = make_morphism(K, S, KU.inclusion, KV.inclusion)
    return K, inc


def _deg(v, P):
    from .polyalg.gb import vec_wdeg

    return vec_wdeg(v, P.pos_deg, P.ring)


def triple_cokernel(m: TripleMorphism):
    """(coker u, alpha', coker v), with the projection morphism."""
    S, T = m.source, m.target
    CL = cokernel(T.left_presentation, m.u.columns())
    CR = cokernel(T.right_presentation, m.v.columns())
    f = S.base_map
    CLb, CRb = _pulled(CL, f), _pulled(CR, f)
    alpha = GradedMap.from_columns(CLb.generators, CRb.generators, T.alpha.columns())
    C = validate_triple(_wrap(CL, S.context), alpha, _wrap(CR, S.context), S.context)
    one = CL.ring.field.one()
    idl = GradedMap.from_columns(T.left_presentation.generators, CL.generators, [{(j, CL.ring.zero_exp): one} for j in range(CL.rank)])
    idr = GradedMap.from_columns(T.right_presentation.generators, CR.generators, [{(j, CR.ring.zero_exp): one} for j in range(CR.rank)])
    proj = make_morphism(T, C, idl, idr)
    return C, proj


def sequence_exact(triples, morphisms) -> dict:
    """Certify 0 -> T1 -> T2 -> T3 -> 0 componentwise (exact iff both components are)."""
    T1, T2, T3 = triples
    m1, m2 = morphisms
    if m1.source is not T1 or m1.target is not T2 or m2.source is not T2 or m2.target is not T3:
        if not (m1.target.key() == T2.key() == m2.source.key() and m1.source.key() == T1.key() and m2.target.key() == T3.key()):
            raise Pbk0Error("morphisms are not composable along the given triples")
    left = short_exact_cert(T1.left_presentation, m1.u.columns(), T2.left_presentation, m2.u.columns(), T3.left_presentation)
    right = short_exact_cert(T1.right_presentation, m1.v.columns(), T2.right_presentation, m2.v.columns(), T3.right_presentation)
    return {"left": left, "right": right, "exact": left["exact"] and right["exact"]}


def is_mr_triple(T: Triple) -> bool:
    if not T.over_bundle:
        raise Pbk0Error("Mumford-regularity is defined for triples over a projective bundle")
    return is_mumford_regular(T.left) and is_mumford_regular(T.right)


# -- pushforward ---------------------------------------------------------------------


def split_by_base(v, nx):
    """Slice a vector over B[x] by base exponent: {beta: {(pos, x-exp padded): c}}."""
    out = {}
    for (pos, e), c in v.items():
        out.setdefault(e[nx:], {})[(pos, e[:nx])] = c
    return out


def sections_action(alpha_cols, left_push, right_push, ring_B):
    """Matrix over B (as term dicts) of alpha on degree-0 sections.

    Basis vectors of the left sections are defined over the field; their
    images are split by base monomial and each slice is expressed in the
    right basis by normal forms over the field.
    """
    nx = ring_B.nx
    pad = ring_B.nvars - nx
    model = right_push.model
    cols = []
    for pos, e in left_push.piece.basis:
        b = {(pos, e + (0,) * pad): ring_B.field.one()}
        img = apply_columns(alpha_cols, b, ring_B)
        col = {}
        for beta, slice_ in split_by_base(img, nx).items():
            coords = coordinates(model, right_push.piece, slice_)
            for i, c in coords.items():
                col[(i, beta)] = c
        cols.append(col)
    return cols


def pushforward_alpha(T: Triple) -> Triple:
    """(pi_* F1, alpha on sections, pi_* F2) as a triple over the base map."""
    if not T.over_bundle:
        raise Pbk0Error("pushforward needs a triple over a projective bundle")
    if not is_mr_triple(T):
        raise NotRegularError("pushforward_alpha needs Mumford-regular components")
    return pushforward_triple(T)


def pushforward_triple(T: Triple) -> Triple:
    """As pushforward_alpha, without the regularity precondition."""
    f = T.base_map
    PL, PR = pushforward_module(T.left), pushforward_module(T.right)
    if not (PL.certified and PR.certified):
        raise NotRegularError("sections of the components are not certified")
    if "linear-form" in (PL.model_kind, PR.model_kind):
        raise UnsupportedInstance("alpha cannot act on a sections model with new generators")
    ring_B = PolyRing(f.target, T.context.r)
    raw = sections_action(T.alpha.columns(), PL, PR, ring_B)
    Bbase = PolyRing(f.target, None)
    cols = [{(i, beta): c for (i, beta), c in col.items()} for col in raw]
    src = GradedFreeModule(Bbase, [0] * PL.rank)
    tgt = GradedFreeModule(Bbase, [0] * PR.rank)
    alpha = GradedMap.from_columns(src, tgt, cols)
    out = validate_triple(PL.presentation, alpha, PR.presentation, f)
    out.certificate["sections_certified"] = True
    return out
