"""Coherent sheaves on P^r over catalog bases: cohomology, pushforward, regularity.

Cohomology over a field is computed by graded local duality from a minimal
free resolution of a presenting module M (``n = r + 1`` variables):

    dim H^q(F(d))  = dim Ext^{r-q}(M, S(-n))_{-d}                  (q >= 1)
    dim H^0(F(d))  = dim M_d - dim Ext^{n}(M, S(-n))_{-d}
                              + dim Ext^{r}(M, S(-n))_{-d}

The last line accounts for the local cohomology H^0_m(M) and H^1_m(M).
A Laurent-monomial Čech computation for sums of line bundles serves as an
independent oracle.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass

from .errors import NotRegularError, Pbk0Error, SectionsError, TwistCapExceeded, UnsupportedInstance
from .grmod import (
    DegreePiece,
    GradedFreeModule,
    GradedMap,
    GradedModulePresentation,
    cokernel,
    degree_piece,
    free_dim,
    free_resolution,
    hilbert_function,
    is_zero_sheaf,
    prune,
    rank_of_map_in_degree,
    saturate_submodule,
    saturated,
    subquotient,
    twist,
)
from .polyalg import linalg
from .polyalg.ring import BaseRingSpec, PolyRing, Polynomial
from .polyalg.submod import Submodule

DEFAULT_MAX_TWIST = 32


# -- base maps ---------------------------------------------------------------


class BaseMap:
    """A flat catalog map A -> B: identity, polynomial extension or localization."""

    KINDS = ("identity", "polynomial-extension", "localization")

    def __init__(self, source: BaseRingSpec, target: BaseRingSpec, kind: str | None = None):
        if source.field != target.field:
            raise Pbk0Error("base map must keep the coefficient field")
        self.source = source
        self.target = target
        self.kind = kind or self._infer()
        if self.kind not in self.KINDS:
            raise Pbk0Error(f"unknown base-map kind {self.kind!r}")
        if self._infer() != self.kind:
            raise Pbk0Error(f"{source} -> {target} is not a {self.kind}")

    def _infer(self):
        s, t = self.source, self.target
        if s == t:
            return "identity"
        if not set(s.variables) <= set(t.variables) or not set(s.inverted) <= set(t.inverted):
            raise Pbk0Error(f"{s} -> {t} is not in the flat catalog")
        if t.inverted and not s.inverted:
            return "localization"
        return "polynomial-extension"

    @classmethod
    def identity(cls, base: BaseRingSpec) -> "BaseMap":
        return cls(base, base, "identity")

    @property
    def field(self):
        return self.source.field

    def inverted_new(self) -> tuple:
        """Variables that become units in B but are not units in A."""
        return tuple(v for v in self.target.inverted if v not in self.source.inverted)

    def ring_map(self, ring: PolyRing) -> PolyRing:
        return PolyRing(self.target, ring.r)

    def map_poly(self, p: Polynomial, r=None) -> Polynomial:
        tgt = PolyRing(self.target, p.ring.r if r is None else r)
        return p.map_to(tgt)

    def map_vec(self, v, source_ring: PolyRing):
        tgt = PolyRing(self.target, source_ring.r)
        idx = [tgt.index[n] for n in source_ring.names]
        out = {}
        for (pos, e), c in v.items():
            new = [0] * tgt.nvars
            for i, a in enumerate(e):
                new[idx[i]] = a
            out[(pos, tuple(new))] = c
        return out

    def __eq__(self, other):
        return isinstance(other, BaseMap) and (self.source, self.target) == (other.source, other.target)

    def __hash__(self):
        return hash((self.source, self.target))

    def __repr__(self):
        return f"{self.source} -> {self.target}"


@dataclass(frozen=True)
class ProjBundleMap:
    """The square P^r_B -> P^r_A over Spec B -> Spec A, with E = O^{r+1}."""

    base_map: BaseMap
    r: int

    def __post_init__(self):
        if not 1 <= self.r <= 3:
            raise Pbk0Error(f"r = {self.r} out of range")

    @property
    def source_ring(self) -> PolyRing:
        return PolyRing(self.base_map.source, self.r)

    @property
    def target_ring(self) -> PolyRing:
        return PolyRing(self.base_map.target, self.r)

    @property
    def rank_E(self) -> int:
        return self.r + 1


# -- sheaves ------------------------------------------------------------------


class Sheaf:
    """The sheaf associated with a graded presentation.

    ``origin`` optionally records that this sheaf is the flat base change of
    another sheaf ``origin[0]`` along the BaseMap ``origin[1]``.
    """

    def __init__(self, presentation: GradedModulePresentation, origin=None):
        if presentation.ring.r is None or presentation.ring.r < 1:
            raise Pbk0Error("sheaves need a projective space of dimension >= 1")
        self.presentation = presentation
        self.origin = origin
        self._lock = threading.Lock()
        self._cache = {}

    @classmethod
    def line_bundle(cls, ring: PolyRing, a: int) -> "Sheaf":
        return cls(GradedModulePresentation.free(ring, [a]))

    @classmethod
    def free(cls, ring, twists) -> "Sheaf":
        return cls(GradedModulePresentation.free(ring, twists))

    @property
    def ring(self) -> PolyRing:
        return self.presentation.ring

    @property
    def r(self) -> int:
        return self.ring.r

    @property
    def base(self) -> BaseRingSpec:
        return self.ring.base

    def _cached(self, key, compute):
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        val = compute()
        with self._lock:
            self._cache.setdefault(key, val)
            return self._cache[key]

    def twist(self, n: int) -> "Sheaf":
        if n == 0:
            return self
        origin = None
        if self.origin is not None:
            origin = (self.origin[0].twist(n), self.origin[1])
        out = Sheaf(twist(self.presentation, n), origin)
        with self._lock:
            res = self._cache.get("resolution")
        if res is not None:
            out._cache["resolution"] = res.shifted(n)
        return out

    def resolution(self):
        return self._cached("resolution", lambda: free_resolution(self.presentation))

    def descent(self) -> "Sheaf | None":
        """A sheaf over the coefficient field whose base change is this one."""
        if self.base.is_field:
            return self
        if self.origin is not None:
            return self.origin[0].descent()

        def compute():
            P = self.presentation
            if any(p.has_base_vars() for row in P.relations.matrix for p in row):
                return None
            kring = PolyRing(BaseRingSpec(self.base.field), self.r)
            rels = [{(pos, e[: kring.nvars]): c for (pos, e), c in v.items()} for v in P.rels]
            return Sheaf(GradedModulePresentation.from_vectors(kring, P.twists, rels))

        return self._cached("descent", compute)

    def is_zero(self) -> bool:
        return self._cached("zero", lambda: is_zero_sheaf(self.presentation))

    def __repr__(self):
        return f"Sheaf({self.presentation!r} on P^{self.r}_{self.base})"


def _require_field(F: Sheaf):
    if not F.base.is_field:
        raise UnsupportedInstance(
            "cohomology is only computed over a field base; use higher_direct_image_vanishes "
            "on a base-changed sheaf"
        )


# -- Ext-duality cohomology ---------------------------------------------------


def _dual_twists(F: Sheaf, i):
    res = F.resolution()
    n = F.r + 1
    if i < 0 or i > res.length:
        return ()
    return tuple(-n - a for a in res.twists(i))


def _dual_rank(F: Sheaf, i, e):
    """Rank in degree e of the transposed differential F_i^* -> F_{i+1}^*."""
    res = F.resolution()
    if i < 0 or i + 1 > res.length:
        return 0

    def compute():
        cols = res.maps[i]  # columns of F_{i+1} -> F_i
        nsrc = len(res.twists(i))
        tcols = [{} for _ in range(nsrc)]
        for k, col in enumerate(cols):
            for (j, ex), c in col.items():
                tcols[j][(k, ex)] = c
        return rank_of_map_in_degree(tcols, _dual_twists(F, i), _dual_twists(F, i + 1), F.ring, e)

    return F._cached(("dual_rank", i, e), compute)


def ext_dim(F: Sheaf, i: int, e: int) -> int:
    """dim_k Ext^i(M, S(-r-1))_e for the presenting module M of F."""
    _require_field(F)
    res = F.resolution()
    if i < 0 or i > res.length:
        return 0
    total = free_dim(_dual_twists(F, i), F.ring, e)
    return total - _dual_rank(F, i, e) - _dual_rank(F, i - 1, e)


def local_cohomology_dim(F: Sheaf, i: int, d: int) -> int:
    """dim H^i_m(M)_d via local duality."""
    return ext_dim(F, F.r + 1 - i, -d)


def sheaf_cohomology_dim(F: Sheaf, d: int, q: int) -> int:
    """dim_k H^q(P^r, F(d)) over a field base."""
    _require_field(F)
    r = F.r
    if q < 0 or q > r:
        return 0
    if q >= 1:
        return ext_dim(F, r - q, -d)
    Md = hilbert_function(F.presentation, d)
    return Md - ext_dim(F, r + 1, -d) + ext_dim(F, r, -d)


def saturated_section_dim(F: Sheaf, d: int) -> int:
    """dim of the degree-d piece of the saturated module (equals h^0 when H^1_m vanishes there)."""
    _require_field(F)
    return hilbert_function(F._cached("saturated", lambda: saturated(F.presentation)), d)


def cech_line_bundle_dims(twists, r: int, d: int = 0):
    """[h^0, ..., h^r] of O(a_1+d) + ... by counting Laurent monomials.

    For each exponent vector in a box, the Čech complex of that monomial is
    built on the index sets containing its negative support, and its
    cohomology is computed by ranks.
    """
    n = r + 1
    subsets = [list(itertools.combinations(range(n), p + 1)) for p in range(n)]
    per_support = {}

    def complex_dims(neg):
        if neg in per_support:
            return per_support[neg]
        terms = [[I for I in subsets[p] if set(neg) <= set(I)] for p in range(n)]
        ranks = []
        for p in range(n - 1):
            where = {I: k for k, I in enumerate(terms[p + 1])}
            rows = []
            for I in terms[p]:
                row = {}
                for j in range(n):
                    if j in I:
                        continue
                    J = tuple(sorted(I + (j,)))
                    sign = (-1) ** sum(1 for x in I if x < j)
                    row[where[J]] = sign
                if row:
                    rows.append(row)
            from .polyalg.field import QQ

            ranks.append(linalg.rank([{k: QQ.coerce(v) for k, v in row.items()} for row in rows], QQ))
        dims = []
        for p in range(n):
            incoming = ranks[p - 1] if p >= 1 else 0
            outgoing = ranks[p] if p < n - 1 else 0
            dims.append(len(terms[p]) - incoming - outgoing)
        per_support[neg] = dims
        return dims

    out = [0] * n
    for a in twists:
        D = a + d
        B = abs(D) + n + 1
        for head in itertools.product(range(-B, B + 1), repeat=n - 1):
            last = D - sum(head)
            if abs(last) > B:
                continue
            alpha = head + (last,)
            neg = tuple(i for i, x in enumerate(alpha) if x < 0)
            for p, c in enumerate(complex_dims(neg)):
                out[p] += c
    return out


# -- pushforward ----------------------------------------------------------------


@dataclass
class Pushforward:
    """pi_* F as a module over the base ring.

    ``model`` is a presentation of F over the coefficient field whose degree-0
    piece equals H^0(F) (certified), and ``piece`` its degree-0 basis.  When F
    is a base change of a field sheaf, the A-module is free on that basis.
    """

    presentation: GradedModulePresentation
    model: GradedModulePresentation | None
    piece: DegreePiece | None
    certified: bool
    model_kind: str = "saturation"

    @property
    def rank(self):
        return self.presentation.rank


SECTIONS_CAP = 8


def _nonzerodivisor(sub: Submodule):
    """A linear form l with (N : l) = N, trying variables first, then partial sums."""
    ring = sub.ring
    cands = [ring.x(i) for i in range(ring.nx)]
    acc = ring.zero()
    for i in range(ring.nx):
        acc = acc + ring.x(i)
        if i:
            cands.append(acc)
    for l in cands:
        if sub.contains_all(sub.colon_element(l.terms)):
            return l
    return None


def _linear_form_model(M: GradedModulePresentation, d: int):
    """(sat(l^k M) / rels)(k): same sheaf as M, with all sections of F(d) in degree d."""
    ring = M.ring
    sub = M.image()
    l = _nonzerodivisor(sub)
    if l is None:
        raise SectionsError("no linear nonzerodivisor on the saturated module")
    for k in range(1, SECTIONS_CAP + 1):
        lk = (l ** k).terms
        gens = [{(j, e): c for e, c in lk.items()} for j in range(M.rank)]
        N, _ = saturate_submodule(Submodule(ring, M.pos_deg, gens + M.rels))
        model = subquotient(ring, M.pos_deg, N.minimalized().gens, M.rels).presentation.twist(k)
        S = Sheaf(model)
        if ext_dim(S, S.r, -d) == 0 and ext_dim(S, S.r + 1, -d) == 0:
            return model
    raise SectionsError(f"H^1_m does not vanish in degree {d} after {SECTIONS_CAP} multiplications")


def _sections_model_full(F: Sheaf, d: int):
    _require_field(F)

    def compute():
        if ext_dim(F, F.r + 1, -d) == 0 and ext_dim(F, F.r, -d) == 0:
            return F.presentation, "presentation"
        sat = F._cached("saturated", lambda: saturated(F.presentation))
        S = Sheaf(sat)
        if ext_dim(S, S.r, -d) == 0:
            return sat, "saturation"
        return _linear_form_model(sat, d), "linear-form"

    return F._cached(("model", d), compute)


def sections_model(F: Sheaf, d: int = 0) -> GradedModulePresentation:
    """A presentation of F (field base) whose degree-d piece is H^0(F(d)).

    Tried in order: the presentation itself, its saturation, and
    (sat(l^k M))(k) for a linear nonzerodivisor l.  Only the first two keep
    the original generators, which matters when alpha has to act on them.
    """
    return _sections_model_full(F, d)[0]


def sections_model_kind(F: Sheaf, d: int = 0) -> str:
    return _sections_model_full(F, d)[1]


def pushforward_module(F: Sheaf) -> Pushforward:
    """pi_* F: the degree-0 piece of a sections model."""
    K = F.descent()
    base_ring = PolyRing(F.base, None)
    if K is not None:
        model = sections_model(K)
        piece = degree_piece(model, 0)
        if piece.rank != sheaf_cohomology_dim(K, 0, 0):
            raise SectionsError("degree-0 piece does not match h^0")
        P = GradedModulePresentation.free(base_ring, [0] * piece.rank)
        return Pushforward(P, model, piece, True, sections_model_kind(K))
    sat = F._cached("saturated", lambda: saturated(F.presentation))
    piece = degree_piece(sat, 0)
    P, _ = prune(piece.presentation)
    return Pushforward(P, None, None, False)


def higher_direct_image_vanishes(F: Sheaf, d: int, q: int) -> bool:
    """R^q pi_* F(d) = 0, answered over a field or on a field origin by flat base change."""
    if q < 1:
        raise Pbk0Error("q must be at least 1")
    K = F.descent()
    if K is None:
        raise UnsupportedInstance(
            "non-field base and the sheaf is not marked as a flat base change of a field sheaf"
        )
    return sheaf_cohomology_dim(K, d, q) == 0


def is_mumford_regular(F: Sheaf) -> bool:
    return all(higher_direct_image_vanishes(F, -q, q) for q in range(1, F.r + 1))


def first_obstruction(F: Sheaf):
    for q in range(1, F.r + 1):
        if not higher_direct_image_vanishes(F, -q, q):
            return q
    return None


def regularity_offset(F: Sheaf, max_twist: int = DEFAULT_MAX_TWIST) -> int:
    """Smallest n >= 0 with F(n) Mumford-regular."""
    last = None
    for n in range(max_twist + 1):
        q = first_obstruction(F.twist(n))
        if q is None:
            return n
        last = q
    raise TwistCapExceeded(max_twist, last)


def epsilon_map(F: Sheaf):
    """The surjection pi^* pi_* F -> F on a sections model; returns (map, model, certificate)."""
    if not is_mumford_regular(F):
        raise NotRegularError("epsilon needs a Mumford-regular sheaf")
    push = pushforward_module(F)
    if not push.certified:
        raise UnsupportedInstance("sections of this sheaf are not certified")
    ring = F.ring
    kring = push.model.ring
    one = ring.field.one()
    cols = []
    for pos, e in push.piece.basis:
        full = e + (0,) * (ring.nvars - kring.nvars)
        cols.append({(pos, full): one})
    model = push.model
    if ring != kring:
        model = GradedModulePresentation.from_vectors(
            ring, model.twists, [{(p, e + (0,) * (ring.nvars - kring.nvars)): c for (p, e), c in v.items()} for v in model.rels]
        )
    src = GradedFreeModule(ring, [0] * len(cols))
    eps = GradedMap.from_columns(src, model.generators, cols)
    cert = {"cokernel_zero_sheaf": is_zero_sheaf(cokernel(model, cols))}
    if not cert["cokernel_zero_sheaf"]:
        raise Pbk0Error("epsilon is not surjective")
    return eps, model, cert


# -- base change and bundles ------------------------------------------------------


def pullback_presentation(M: GradedModulePresentation, f: BaseMap) -> GradedModulePresentation:
    if M.ring.base != f.source:
        raise Pbk0Error(f"presentation over {M.ring.base}, base map from {f.source}")
    ring = PolyRing(f.target, M.ring.r)
    return GradedModulePresentation.from_vectors(ring, M.twists, [f.map_vec(v, M.ring) for v in M.rels])


def pullback_map(phi: GradedMap, f: BaseMap) -> GradedMap:
    ring = PolyRing(f.target, phi.ring.r)
    src = GradedFreeModule(ring, phi.source.twists)
    tgt = GradedFreeModule(ring, phi.target.twists)
    return GradedMap.from_columns(src, tgt, [f.map_vec(v, phi.ring) for v in phi.columns()])


def pullback_base_change(F, f: BaseMap):
    """Apply f to every matrix entry; sheaves remember their origin."""
    if isinstance(F, GradedMap):
        return pullback_map(F, f)
    if isinstance(F, GradedModulePresentation):
        return pullback_presentation(F, f)
    return Sheaf(pullback_presentation(F.presentation, f), origin=(F, f))


def _det(M, ring):
    n = len(M)
    if n == 0:
        return ring.one()
    if n == 1:
        return M[0][0]
    total = ring.zero()
    for j in range(n):
        if M[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _det(minor, ring)
        total = total + term if j % 2 == 0 else total - term
    return total


def fitting_ideal(M: GradedModulePresentation, j: int):
    """Generators of Fitt_j: the (s-j)-minors of the relation matrix."""
    M, _ = prune(M)
    ring = M.ring
    s = M.rank
    k = s - j
    if k <= 0:
        return [ring.one()]
    mat = M.relations.matrix
    m = len(M.rels)
    if k > m:
        return []
    out = []
    for rows in itertools.combinations(range(s), k):
        for cols in itertools.combinations(range(m), k):
            sub = [[mat[i][c] for c in cols] for i in rows]
            d = _det(sub, ring)
            if not d.is_zero():
                out.append(d)
    return out


def is_vector_bundle(F: Sheaf, n: int) -> bool:
    """Locally free of rank n away from the irrelevant locus, by Fitting ideals."""
    P = F.presentation
    lower = fitting_ideal(P, n - 1) if n >= 1 else []
    if lower:
        return False
    upper = fitting_ideal(P, n)
    ring = F.ring
    Q = GradedModulePresentation.from_vectors(ring, [0], [{(0, e): c for e, c in p.terms.items()} for p in upper])
    return is_zero_sheaf(Q)
