"""Quillen resolutions of Mumford-regular sheaves and triples, and Koszul complexes.

The absolute resolution is built in embedded form over the coefficient
field.  With ``M`` a sections model of F (degree-0 piece = H^0):

* ``T_0`` has basis ``b^0``: standard monomials of ``M_0``; ``d_0`` sends the
  i-th generator of ``S^{N_0}`` to ``b^0_i``; ``K_0 = ker d_0``.
* ``T_n`` (n >= 1) has basis ``b^n``: a reduced echelon basis of the
  degree-1 part of ``K_{n-1}`` inside ``S^{N_{n-1}}``; ``d_n`` has the
  columns ``b^n`` and ``K_n = ker d_n``.

Then ``Z_n = K_n(-n)`` and ``0 -> S(-r)^{N_r} -> ... -> S^{N_0} -> M``
is the resolution; every piece is certified by zero-sheaf tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

from .errors import CertificateError, NotRegularError, Pbk0Error, UnsupportedInstance
from .grmod import (
    GradedFreeModule,
    GradedMap,
    GradedModulePresentation,
    apply_columns,
    check_complex,
    coordinates,
    degree_piece,
    exact_at,
    hilbert_function,
    injective_cert,
    preimage,
    subquotient,
    surjective_cert,
    twist,
    zero_sheaf_witness,
)
from .polyalg import linalg
from .polyalg.gb import vec_wdeg
from .polyalg.ring import PolyRing
from .relcat import Triple, is_mr_triple, pullback_presentation, split_by_base, validate_triple
from .sheafcoh import ProjBundleMap, Sheaf, is_mumford_regular, sections_model, sections_model_kind, sheaf_cohomology_dim

R_CAP = 3


@dataclass
class QuillenResolutionData:
    """Embedded Quillen data of a sheaf over the coefficient field.

    ``bases[n]`` lists the basis vectors ``b^n`` (columns of ``d_n``),
    ``kernels[n]`` generators of ``K_n``; ``ranks[n] = dim T_n``.
    """

    input: object
    model: GradedModulePresentation
    bases: list
    kernels: list
    ranks: list
    T: list  # T_n as free modules over the base ring
    sequences: list  # certificates for 0 -> Z_n(n) -> pi^*T_n -> Z_{n-1}(n) -> 0
    long_exact: dict
    zr_zero: bool
    certificate: dict = field(default_factory=dict)

    @property
    def r(self):
        return self.model.ring.r

    def free_term(self, n) -> GradedFreeModule:
        """(pi^* T_n)(-n) over the field."""
        return GradedFreeModule(self.model.ring, [-n] * self.ranks[n])

    def Z(self, n) -> Sheaf:
        """Z_n = K_n(-n) as a sheaf (presentation by syzygies)."""
        if n == -1:
            return Sheaf(self.model)
        ring = self.model.ring
        pos_deg = (0,) * self.ranks[n]
        sq = subquotient(ring, pos_deg, self.kernels[n], [])
        return Sheaf(twist(sq.presentation, -n))


def _linear_span_basis(vectors, ring, nvec):
    """Reduced echelon basis of the k-span of degree-1 vectors in S^{nvec}.

    Columns are indexed by (position, variable) in lexicographic order.
    """
    nx = ring.nx
    col_of = {}
    for p in range(nvec):
        for i in range(nx):
            col_of[(p, i)] = len(col_of)
    eb = linalg.EchelonBasis(ring.field)
    for v in vectors:
        row = {}
        for (p, e), c in v.items():
            i = next(k for k, a in enumerate(e[:nx]) if a)
            row[col_of[(p, i)]] = c
        eb.add(row)
    inv = {c: k for k, c in col_of.items()}
    basis = []
    pivots = eb.pivots
    for piv in pivots:
        row = eb.rows[piv]
        vec = {}
        for col, c in row.items():
            p, i = inv[col]
            e = [0] * ring.nvars
            e[i] = 1
            vec[(p, tuple(e))] = c
        basis.append(vec)
    return basis, eb, col_of


def _degree_one_part(gens, ring, pos_deg):
    """k-spanning set of the degree-1 part of span(gens) inside S^{N} (gens in degrees >= 1)."""
    out = []
    for g in gens:
        d = vec_wdeg(g, pos_deg, ring)
        if d < 1:
            raise CertificateError("kernel has a nonzero degree-0 element")
        if d == 1:
            out.append(g)
    return out


def quillen_resolution(F: Sheaf, check_regular: bool = True) -> QuillenResolutionData:
    """Quillen resolution of a Mumford-regular sheaf (computed on its field descent)."""
    K = F.descent()
    if K is None:
        raise UnsupportedInstance("Quillen resolutions need a sheaf defined over the coefficient field")
    if K.r > R_CAP:
        raise Pbk0Error("r is capped at 3")
    if check_regular and not is_mumford_regular(K):
        raise NotRegularError("Quillen resolution needs a Mumford-regular sheaf")
    r = K.r
    model = sections_model(K)
    ring = model.ring
    piece = degree_piece(model, 0)
    one = ring.field.one()
    b0 = [{(p, e): one} for p, e in piece.basis]
    bases = [b0]
    ranks = [len(b0)]
    kernels = []
    sequences = []
    h0 = sheaf_cohomology_dim(K, 0, 0)
    if ranks[0] != h0:
        raise CertificateError("T_0 rank does not match h^0")
    # stage 0
    free0 = GradedModulePresentation.free(ring, [0] * ranks[0])
    K0 = preimage(b0, model, free0.pos_deg)
    kernels.append(_span_gens(ring, free0.pos_deg, K0))
    sequences.append(_stage_cert(ring, kernels[0], free0, b0, model))
    prev_free = free0
    for n in range(1, r + 1):
        Kprev = kernels[n - 1]
        lin = _degree_one_part(Kprev, ring, prev_free.pos_deg)
        bn, _, _ = _linear_span_basis(lin, ring, ranks[n - 1])
        Zprev_twisted = _kernel_sheaf(ring, prev_free.pos_deg, Kprev, 1)
        hn = sheaf_cohomology_dim(Zprev_twisted, 0, 0) if Kprev else 0
        if len(bn) != hn:
            raise CertificateError(f"T_{n} rank {len(bn)} does not match h^0 = {hn}")
        bases.append(bn)
        ranks.append(len(bn))
        # target of d_n is S^{N_{n-1}} shifted so that d_n has linear entries
        free_n = GradedModulePresentation.free(ring, [0] * ranks[n])
        tgt = GradedModulePresentation.free(ring, [1] * ranks[n - 1])
        Kn = preimage(bn, tgt, free_n.pos_deg)
        kernels.append(_span_gens(ring, free_n.pos_deg, Kn))
        sequences.append(_stage_cert(ring, kernels[n], free_n, bn, tgt, Kprev))
        prev_free = free_n
    zr = subquotient(ring, (0,) * ranks[r], kernels[r], []).presentation
    zr_zero = zero_sheaf_witness(zr) is None
    long_exact = _long_exact_cert(ring, model, bases, ranks, r)
    base_ring = PolyRing(F.base, None)
    T = [GradedModulePresentation.free(base_ring, [0] * n) for n in ranks]
    data = QuillenResolutionData(F, model, bases, kernels, ranks, T, sequences, long_exact, zr_zero)
    data.certificate = {
        "Z_r_zero": zr_zero,
        "sequences_exact": all(s["exact"] for s in sequences),
        "long_exact": long_exact["exact"],
    }
    if not all(data.certificate.values()):
        raise CertificateError(f"Quillen certificates failed: {data.certificate}")
    return data


def _span_gens(ring, pos_deg, gens):
    from .polyalg.submod import Submodule

    return Submodule(ring, pos_deg, gens).minimalized().gens


def _kernel_sheaf(ring, pos_deg, gens, n):
    sq = subquotient(ring, pos_deg, gens, [])
    return Sheaf(twist(sq.presentation, n))


def _stage_cert(ring, kernel_gens, free_src, cols, target, target_span=None):
    """0 -> K -> free -> target (onto the span of ``target_span`` if given)."""
    sq = subquotient(ring, free_src.pos_deg, kernel_gens, [])
    inj = injective_cert(sq.inclusion, sq.presentation, free_src)
    mid = exact_at(kernel_gens, free_src, cols, target)
    if target_span is None:
        sur = surjective_cert(cols, target)
    else:
        if not target_span:
            sur = {"exact": not cols or all(not c for c in cols)}
        else:
            quot = subquotient(ring, target.pos_deg, target_span, cols).presentation
            sur = {"cokernel_generators": quot.rank, "exact": zero_sheaf_witness(quot) is None}
    return {"injective": inj, "middle": mid, "surjective": sur, "exact": inj["exact"] and mid["exact"] and sur["exact"]}


def _long_exact_cert(ring, model, bases, ranks, r):
    frees = [GradedModulePresentation.free(ring, [-n] * ranks[n]) for n in range(r + 1)]
    spots = []
    for n in range(r + 1):
        out_cols = bases[n]
        tgt = model if n == 0 else frees[n - 1]
        in_cols = bases[n + 1] if n + 1 <= r else []
        spots.append(exact_at(in_cols, frees[n], out_cols, tgt))
    sur = surjective_cert(bases[0], model)
    inj = injective_cert(bases[r], frees[r], frees[r - 1] if r >= 1 else model)
    ok = all(s["exact"] for s in spots) and sur["exact"] and inj["exact"]
    return {"spots": spots, "surjective": sur, "injective": inj, "exact": ok}


# -- relative version ------------------------------------------------------------------


@dataclass
class RelativeQuillenData:
    triple: Triple
    left: QuillenResolutionData
    right: QuillenResolutionData
    alphas: list  # alpha_n as column dicts {(row, base-exp): coeff}
    stages: list  # Triples T_n over the base map
    squares: list
    certificate: dict

    @property
    def ranks(self):
        return [(s.left_presentation.rank, s.right_presentation.rank) for s in self.stages]


def _act(alpha_cols, v, ring_B, nx):
    """Apply a B-matrix (columns {(row, beta): c}) to a field vector in S^{N}, giving a B[x] vector."""
    fld = ring_B.field
    out = {}
    for (p, e), c in v.items():
        for (row, beta), a in alpha_cols[p].items():
            t = (row, ring_B.normalize_exp(e[:nx] + beta))
            s = fld.add(out.get(t, fld.zero()), fld.mul(a, c))
            if s:
                out[t] = s
            else:
                out.pop(t, None)
    return out


def relative_quillen_resolution(T: Triple, check_regular: bool = True) -> RelativeQuillenData:
    """Quillen resolution of an MR triple with alpha transported to every stage."""
    if not T.over_bundle:
        raise Pbk0Error("relative Quillen resolutions need a triple over a projective bundle")
    if check_regular and not is_mr_triple(T):
        raise NotRegularError("relative Quillen resolution needs an MR triple")
    f = T.base_map
    QL = quillen_resolution(T.left, check_regular=False)
    QR = quillen_resolution(T.right, check_regular=False)
    if "linear-form" in (sections_model_kind(T.left.descent()), sections_model_kind(T.right.descent())):
        raise UnsupportedInstance("alpha cannot act on a sections model with new generators")
    r = T.context.r
    ring_B = PolyRing(f.target, r)
    nx = ring_B.nx
    pad = ring_B.nvars - nx
    alpha_cols = T.alpha.columns()
    Rmodel_B = GradedModulePresentation.from_vectors(
        ring_B, QR.model.twists, [{(p, e + (0,) * pad): c for (p, e), c in v.items()} for v in QR.model.rels]
    )
    Rsub = Rmodel_B.image()
    Rpiece = degree_piece(QR.model, 0)
    # stage 0: action on sections
    A0 = []
    squares = []
    for b in QL.bases[0]:
        (p, e), c = next(iter(b.items()))
        img = apply_columns(alpha_cols, {(p, e + (0,) * pad): c}, ring_B)
        col = {}
        for beta, slice_ in split_by_base(img, nx).items():
            for i, val in coordinates(QR.model, Rpiece, slice_).items():
                col[(i, beta)] = val
        A0.append(col)
        # square: alpha(b_i) - eps'(A0 col) reduces to 0 modulo the right relations over B
        lhs = dict(img)
        rhs = _act_basis(col, QR.bases[0], ring_B, nx)
        squares.append(not Rsub.reduce(_sub(lhs, rhs, ring_B.field)))
    alphas = [A0]
    for n in range(1, r + 1):
        An = []
        _, ebR, colR = _linear_span_basis(QR.bases[n], QR.model.ring, QR.ranks[n - 1])
        pivots = ebR.pivots
        piv_index = {pv: k for k, pv in enumerate(pivots)}
        for b in QL.bases[n]:
            img = _act(alphas[n - 1], b, ring_B, nx)
            col = {}
            ok = True
            for beta, slice_ in split_by_base(img, nx).items():
                row = {}
                for (p, x), c in slice_.items():
                    i = next(k for k, a in enumerate(x) if a)
                    row[colR[(p, i)]] = c
                if ebR.reduce(row):
                    ok = False
                for pv, k in piv_index.items():
                    c = row.get(pv)
                    if c:
                        col[(k, beta)] = c
            An.append(col)
            squares.append(ok)
        alphas.append(An)
    if not all(squares):
        raise CertificateError("a connecting square of the relative resolution does not commute")
    Abase = PolyRing(f.source, None)
    Bbase = PolyRing(f.target, None)
    stages = []
    for n in range(r + 1):
        src = GradedFreeModule(Bbase, [0] * QL.ranks[n])
        tgt = GradedFreeModule(Bbase, [0] * QR.ranks[n])
        a = GradedMap.from_columns(src, tgt, [{(i, beta): c for (i, beta), c in col.items()} for col in alphas[n]])
        stages.append(
            validate_triple(
                GradedModulePresentation.free(Abase, [0] * QL.ranks[n]),
                a,
                GradedModulePresentation.free(Abase, [0] * QR.ranks[n]),
                f,
            )
        )
    cert = {
        "left": QL.certificate,
        "right": QR.certificate,
        "squares_commute": True,
        "stages_in_VB": True,
        "Z_r_zero": QL.zr_zero and QR.zr_zero,
    }
    return RelativeQuillenData(T, QL, QR, alphas, stages, squares, cert)


def _act_basis(col, basis, ring_B, nx):
    """sum_i col[i, beta] t^beta b_i for field vectors b_i."""
    fld = ring_B.field
    out = {}
    for (i, beta), c in col.items():
        for (p, e), a in basis[i].items():
            t = (p, ring_B.normalize_exp(e[:nx] + beta))
            s = fld.add(out.get(t, fld.zero()), fld.mul(a, c))
            if s:
                out[t] = s
            else:
                out.pop(t, None)
    return out


def _sub(u, v, fld):
    out = dict(u)
    for t, c in v.items():
        s = fld.sub(out.get(t, fld.zero()), c)
        if s:
            out[t] = s
        else:
            out.pop(t, None)
    return out


# -- Koszul -------------------------------------------------------------------------------


@dataclass
class KoszulResolutionData:
    """0 -> F -> F(1)^{C(n,1)} -> ... -> F(n)^{C(n,n)} -> 0 with n = r + 1."""

    input: object
    terms: list  # presentations (left component for triples)
    differentials: list  # column lists
    right_terms: list | None
    right_differentials: list | None
    alphas: list | None
    certificate: dict


def _koszul_complex(P: GradedModulePresentation):
    ring = P.ring
    n = ring.nx
    s = P.rank
    subsets = [list(itertools.combinations(range(n), p)) for p in range(n + 1)]
    index = [{I: k for k, I in enumerate(sub)} for sub in subsets]
    terms = []
    for p in range(n + 1):
        twists = []
        rels = []
        for j in range(s):
            twists.extend([P.twists[j] + p] * len(subsets[p]))
        for rho in P.rels:
            for k, I in enumerate(subsets[p]):
                rels.append({(q * len(subsets[p]) + k, e): c for (q, e), c in rho.items()})
        terms.append(GradedModulePresentation.from_vectors(ring, twists, rels))
    diffs = []
    one = ring.field.one()
    for p in range(n):
        cols = []
        for j in range(s):
            for I in subsets[p]:
                col = {}
                for i in range(n):
                    if i in I:
                        continue
                    J = tuple(sorted(I + (i,)))
                    sign = (-1) ** sum(1 for x in I if x < i)
                    e = [0] * ring.nvars
                    e[i] = 1
                    col[(j * len(subsets[p + 1]) + index[p + 1][J], tuple(e))] = one if sign > 0 else ring.field.neg(one)
                cols.append(col)
        diffs.append(cols)
    return terms, diffs


def _koszul_cert(terms, diffs):
    n = len(diffs)
    spots = []
    complex_ok = True
    for p in range(n - 1):
        complex_ok &= check_complex(diffs[p], diffs[p + 1], terms[p + 2])
    spots.append(injective_cert(diffs[0], terms[0], terms[1]) if n else {"exact": True})
    for p in range(1, n):
        spots.append(exact_at(diffs[p - 1], terms[p], diffs[p], terms[p + 1]))
    if n:
        spots.append(surjective_cert(diffs[n - 1], terms[n]))
    return {"complex": complex_ok, "spots": spots, "exact": complex_ok and all(s["exact"] for s in spots)}


def koszul_resolution(X) -> KoszulResolutionData:
    """Koszul complex of a sheaf or of a triple over a projective bundle, with exactness certified."""
    if isinstance(X, Triple):
        if not X.over_bundle:
            raise Pbk0Error("Koszul complexes live over a projective bundle")
        lt, ld = _koszul_complex(X.left_presentation)
        rt, rd = _koszul_complex(X.right_presentation)
        cl, cr = _koszul_cert(lt, ld), _koszul_cert(rt, rd)
        f = X.base_map
        ring_B = PolyRing(f.target, X.context.r)
        n = ring_B.nx
        a = X.alpha.columns()
        sL, sR = X.left_presentation.rank, X.right_presentation.rank
        alphas = []
        for p in range(n + 1):
            m = comb(n, p)
            cols = []
            for j in range(sL):
                for k in range(m):
                    cols.append({(q * m + k, e): c for (q, e), c in a[j].items()})
            alphas.append(cols)
        squares = True
        for p in range(n):
            dL = [f.map_vec(c, lt[p].ring) for c in ld[p]]
            dR = [f.map_vec(c, rt[p].ring) for c in rd[p]]
            for j in range(len(alphas[p])):
                unit = {(j, ring_B.zero_exp): ring_B.field.one()}
                lhs = apply_columns(dR, apply_columns(alphas[p], unit, ring_B), ring_B)
                rhs = apply_columns(alphas[p + 1], apply_columns(dL, unit, ring_B), ring_B)
                tgt = pullback_presentation(rt[p + 1], f).image()
                if tgt.reduce(_sub(lhs, rhs, ring_B.field)):
                    squares = False
        cert = {"left": cl, "right": cr, "squares_commute": squares, "exact": cl["exact"] and cr["exact"] and squares}
        return KoszulResolutionData(X, lt, ld, rt, rd, alphas, cert)
    P = X.presentation if isinstance(X, Sheaf) else X
    terms, diffs = _koszul_complex(P)
    return KoszulResolutionData(X, terms, diffs, None, None, None, _koszul_cert(terms, diffs))
