"""Graded modules over A[x0..xr] given by presentation matrices.

Internally a module element is a sparse vector ``{(pos, exp): coeff}``; a
free module ``S(a_1) + ... + S(a_s)`` is described by its twists, and the
position weight of generator ``j`` is ``-a_j``.  Presentations are
cokernels of relation matrices whose columns are such vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from .errors import CertificateError, DegreeError, Pbk0Error, RingMismatchError, SaturationError
from .polyalg import linalg
from .polyalg.gb import ModuleOrder, _index, normalize_vec, prepare, reduce_vec, syzygies, vec_wdeg
from .polyalg.ring import PolyRing, Polynomial
from .polyalg.submod import Submodule, combine, split_vec, vec_add, vec_neg, vec_to_coeffs

SATURATION_CAP = 64


# -- free modules and maps ---------------------------------------------------


class GradedFreeModule:
    """``S(a_1) + ... + S(a_s)``; generator ``j`` sits in degree ``-a_j``."""

    def __init__(self, ring: PolyRing, twists=()):
        self.ring = ring
        self.twists = tuple(int(a) for a in twists)

    @property
    def rank(self) -> int:
        return len(self.twists)

    @property
    def pos_deg(self) -> tuple:
        return tuple(-a for a in self.twists)

    def twist(self, n: int) -> "GradedFreeModule":
        return GradedFreeModule(self.ring, [a + n for a in self.twists])

    def __eq__(self, other):
        return isinstance(other, GradedFreeModule) and (self.ring, self.twists) == (other.ring, other.twists)

    def __hash__(self):
        return hash((self.ring, self.twists))

    def __repr__(self):
        if not self.twists:
            return "0"
        return " + ".join(f"S({a})" for a in self.twists)


def columns_to_matrix(ring, nrows, cols):
    rows = [[{} for _ in cols] for _ in range(nrows)]
    for j, v in enumerate(cols):
        for (i, e), c in v.items():
            rows[i][j][e] = c
    return [[Polynomial(ring, t, True) for t in row] for row in rows]


def matrix_to_columns(matrix, ncols):
    cols = [{} for _ in range(ncols)]
    for i, row in enumerate(matrix):
        for j, p in enumerate(row):
            for e, c in p.terms.items():
                cols[j][(i, e)] = c
    return cols


class GradedMap:
    """Homogeneous matrix ``source -> target``; rows index the target.

    Entry ``(i, j)`` must be zero or homogeneous of x-degree ``b_i - a_j``.
    """

    def __init__(self, source: GradedFreeModule, target: GradedFreeModule, matrix=None, _columns=None):
        if source.ring != target.ring:
            raise RingMismatchError(f"{source.ring} vs {target.ring}")
        self.source = source
        self.target = target
        ring = source.ring
        if _columns is not None:
            self._cols = [normalize_vec(c, ring) for c in _columns]
            if len(self._cols) != source.rank:
                raise Pbk0Error("column count does not match the source rank")
            self.matrix = columns_to_matrix(ring, target.rank, self._cols)
        else:
            matrix = [list(row) for row in (matrix or [])]
            if len(matrix) != target.rank or any(len(row) != source.rank for row in matrix):
                raise Pbk0Error(f"matrix shape does not match {target.rank}x{source.rank}")
            for row in matrix:
                for p in row:
                    if p.ring != ring:
                        raise RingMismatchError(f"entry {p} lives in {p.ring}, expected {ring}")
            self.matrix = matrix
            self._cols = matrix_to_columns(matrix, source.rank)
        self._check_degrees()

    def _check_degrees(self):
        for i, row in enumerate(self.matrix):
            b = self.target.twists[i]
            for j, p in enumerate(row):
                if p.is_zero():
                    continue
                want = b - self.source.twists[j]
                if not p.is_homogeneous() or p.xdegree() != want:
                    raise DegreeError(i, j, f"entry ({i},{j}) = {p} should be homogeneous of degree {want}")

    @classmethod
    def from_columns(cls, source, target, cols):
        return cls(source, target, _columns=cols)

    @property
    def ring(self):
        return self.source.ring

    def columns(self):
        return [dict(c) for c in self._cols]

    def is_zero(self) -> bool:
        return not any(self._cols)

    def compose(self, other: "GradedMap") -> "GradedMap":
        """``self o other``."""
        if other.target != self.source:
            raise Pbk0Error("maps are not composable")
        return GradedMap.from_columns(other.source, self.target, [apply_columns(self._cols, c, self.ring) for c in other._cols])

    def __repr__(self):
        return f"GradedMap({self.source} -> {self.target}, {self.matrix})"


def apply_columns(cols, v, ring):
    """Image of the vector ``v`` under the map whose columns are ``cols``."""
    return combine(vec_to_coeffs(v, len(cols)), cols, ring)


def identity_map(F: GradedFreeModule) -> GradedMap:
    one = F.ring.field.one()
    return GradedMap.from_columns(F, F, [{(j, F.ring.zero_exp): one} for j in range(F.rank)])


def zero_map(source, target) -> GradedMap:
    return GradedMap.from_columns(source, target, [{} for _ in range(source.rank)])


# -- presentations -----------------------------------------------------------


class GradedModulePresentation:
    """``coker(F1 -> F0)``; ``rels`` are the columns of the relation matrix."""

    def __init__(self, generators: GradedFreeModule, relations: GradedMap | None = None):
        self.generators = generators
        if relations is None:
            relations = GradedMap.from_columns(GradedFreeModule(generators.ring, ()), generators, [])
        if relations.target != generators:
            raise Pbk0Error("relations must map into the generators")
        self.relations = relations
        self.rels = [c for c in relations.columns() if c]

    @classmethod
    def from_vectors(cls, ring, twists, rels):
        """Build from relation vectors, inferring the source twists."""
        F0 = GradedFreeModule(ring, twists)
        fld = ring.field
        rels = [{t: fld.coerce(c) for t, c in v.items()} for v in rels]
        rels = [r for r in (normalize_vec(v, ring) for v in rels) if r]
        src = GradedFreeModule(ring, [-vec_wdeg(v, F0.pos_deg, ring) for v in rels])
        return cls(F0, GradedMap.from_columns(src, F0, rels))

    @classmethod
    def free(cls, ring, twists):
        return cls(GradedFreeModule(ring, twists))

    @property
    def ring(self):
        return self.generators.ring

    @property
    def twists(self):
        return self.generators.twists

    @property
    def pos_deg(self):
        return self.generators.pos_deg

    @property
    def rank(self):
        return self.generators.rank

    def image(self) -> Submodule:
        return Submodule(self.ring, self.pos_deg, self.rels)

    def twist(self, n: int) -> "GradedModulePresentation":
        return twist(self, n)

    def key(self):
        """Canonical text used for hashing and display."""
        cols = ["[" + ", ".join(str(p) for p in col) + "]" for col in zip(*self.relations.matrix)] if self.rels else []
        return f"{self.ring}|{list(self.twists)}|{';'.join(cols)}"

    def __repr__(self):
        if not self.rels:
            return f"free {self.generators}"
        return f"coker({len(self.rels)} relations -> {self.generators})"


def twist(M: GradedModulePresentation, n: int) -> GradedModulePresentation:
    F0 = M.generators.twist(n)
    F1 = M.relations.source.twist(n)
    return GradedModulePresentation(F0, GradedMap.from_columns(F1, F0, M.relations.columns()))


def cokernel(M: GradedModulePresentation, cols) -> GradedModulePresentation:
    """``M / (span of cols)``."""
    return GradedModulePresentation.from_vectors(M.ring, M.twists, M.rels + [c for c in cols if c])


def direct_sum(*mods) -> GradedModulePresentation:
    ring = mods[0].ring
    twists, rels, off = [], [], 0
    for M in mods:
        twists.extend(M.twists)
        rels.extend({(p + off, e): c for (p, e), c in v.items()} for v in M.rels)
        off += M.rank
    return GradedModulePresentation.from_vectors(ring, twists, rels)


# -- subquotients and kernels -------------------------------------------------


@dataclass
class Subquotient:
    """Presentation of K/L inside a free module, with the inclusion of generators."""

    presentation: GradedModulePresentation
    inclusion: list  # columns: generator i of the presentation as a vector of the ambient
    certificate: dict = field(default_factory=dict)


def prune(M: GradedModulePresentation, inclusion=None):
    """Remove generators killed by a relation with a unit field constant.

    Returns the smaller presentation and the matching inclusion columns.
    """
    ring = M.ring
    fld = ring.field
    twists = list(M.twists)
    rels = [dict(v) for v in M.rels]
    incl = list(inclusion) if inclusion is not None else None
    alive = list(range(len(twists)))
    z = ring.zero_exp
    while True:
        hit = None
        for k, v in enumerate(rels):
            for (p, e), c in v.items():
                if e == z:
                    hit = (k, p, c)
                    break
            if hit:
                break
        if hit is None:
            break
        k, j, c = hit
        col = rels.pop(k)
        inv = fld.inv(c)
        new = []
        for v in rels:
            coef = {e: a for (p, e), a in v.items() if p == j}
            if coef:
                scaled = {e: fld.mul(a, inv) for e, a in coef.items()}
                sub = combine([scaled], [col], ring)
                v = vec_add(v, vec_neg(sub, fld), fld)
            if v:
                new.append(v)
        rels = new
        alive.remove(j)
    remap = {old: i for i, old in enumerate(alive)}
    rels = [{(remap[p], e): c for (p, e), c in v.items()} for v in rels]
    out = GradedModulePresentation.from_vectors(ring, [twists[j] for j in alive], rels)
    if incl is not None:
        incl = [incl[j] for j in alive]
    return out, incl


def subquotient(ring, pos_deg, K, L, do_prune=True) -> Subquotient:
    """Presentation of span(K) / (span(L) intersected with span(K))."""
    K = [k for k in (normalize_vec(v, ring) for v in K) if k]
    L = [v for v in L if v]
    twists = [-vec_wdeg(k, pos_deg, ring) for k in K]
    if not K:
        return Subquotient(GradedModulePresentation.free(ring, []), [])
    cols = K + L
    degs = [-a for a in twists] + [vec_wdeg(v, pos_deg, ring) for v in L]
    rels = []
    for z in syzygies(cols, degs, pos_deg, ring):
        head, _ = split_vec(z, len(K))
        if head:
            rels.append(head)
    M = GradedModulePresentation.from_vectors(ring, twists, rels)
    incl = list(K)
    if do_prune:
        M, incl = prune(M, incl)
    return Subquotient(M, incl)


def preimage(cols, target: GradedModulePresentation, source_pos_deg):
    """Generators of {v : psi(v) in im(target relations)} for psi given by ``cols``."""
    ring = target.ring
    n = len(cols)
    if n == 0:
        return []
    degs = list(source_pos_deg)
    allc = list(cols) + target.rels
    alld = degs + [vec_wdeg(v, target.pos_deg, ring) for v in target.rels]
    out = []
    unit = ring.field.one()
    zero_cols = [j for j, c in enumerate(cols) if not c]
    nz = [j for j, c in enumerate(cols) if c]
    for j in zero_cols:
        out.append({(j, ring.zero_exp): unit})
    if nz:
        sub = [allc[j] for j in nz] + target.rels
        subd = [alld[j] for j in nz] + alld[n:]
        for z in syzygies(sub, subd, target.pos_deg, ring):
            head, _ = split_vec(z, len(nz))
            if head:
                out.append({(nz[p], e): c for (p, e), c in head.items()})
    return out


@dataclass
class KernelResult:
    presentation: GradedModulePresentation
    inclusion: GradedMap  # generators of the kernel -> source generators
    certificate: dict


def _as_presentation(X, ring):
    if isinstance(X, GradedModulePresentation):
        return X
    if isinstance(X, GradedFreeModule):
        return GradedModulePresentation(X)
    raise Pbk0Error(f"expected a presentation, got {type(X).__name__}")


def kernel_of_map(psi: GradedMap, source=None, target=None) -> KernelResult:
    """Kernel of the map of presentations induced by ``psi`` on generators."""
    src = _as_presentation(source if source is not None else psi.source, psi.ring)
    tgt = _as_presentation(target if target is not None else psi.target, psi.ring)
    if src.generators != psi.source or tgt.generators != psi.target:
        raise Pbk0Error("psi does not act on the given presentations")
    ring = psi.ring
    cols = psi.columns()
    tsub = tgt.image()
    for k, rel in enumerate(src.rels):
        if not tsub.contains(apply_columns(cols, rel, ring)):
            raise CertificateError(f"psi does not respect relation {k} of the source")
    K = preimage(cols, tgt, src.pos_deg)
    sq = subquotient(ring, src.pos_deg, K, src.rels)
    P = sq.presentation
    incl = GradedMap.from_columns(P.generators, src.generators, sq.inclusion)
    residues = [tsub.reduce(apply_columns(cols, k, ring)) for k in sq.inclusion]
    if any(residues):
        raise CertificateError("kernel generator does not map to zero")
    cert = {"composite_normal_forms_zero": True, "generators": len(sq.inclusion)}
    return KernelResult(P, incl, cert)


# -- saturation and zero tests ------------------------------------------------


def irrelevant_ideal(ring):
    return [ring.x(i).terms for i in range(ring.nx)]


def saturate_submodule(sub: Submodule, cap=SATURATION_CAP):
    """Iterate N <- N : m until stable; returns (N, iterations)."""
    ring = sub.ring
    m = irrelevant_ideal(ring)
    N = sub
    for it in range(1, cap + 1):
        Q = N.colon_ideal(m)
        if N.contains_all(Q):
            return N, it
        N = Q
    raise SaturationError(f"saturation did not stabilize after {cap} iterations")


def saturate_image(phi, cap=SATURATION_CAP):
    """``(im phi : (x0..xr)^inf)`` for a GradedMap or a presentation."""
    if isinstance(phi, GradedModulePresentation):
        sub = phi.image()
    else:
        sub = Submodule(phi.ring, phi.target.pos_deg, phi.columns())
    return saturate_submodule(sub, cap)


def saturated(M: GradedModulePresentation) -> GradedModulePresentation:
    N, _ = saturate_image(M)
    return GradedModulePresentation.from_vectors(M.ring, M.twists, N.minimalized().gens)


def zero_sheaf_witness(M: GradedModulePresentation):
    """First generator index whose image is not killed by a power of every x_i, else None.

    Decided from leading terms: the Gröbner basis of the relations must
    contain, in every component, a pure power of every x_i.  For modules
    over the base ring alone this is the zero-module test.
    """
    if M.rank == 0:
        return None
    ring = M.ring
    nx = ring.nx
    lts = M.image().leading_terms()
    for j in range(M.rank):
        mine = [e for p, e in lts if p == j and not any(e[nx:])]
        if nx == 0:
            if not mine:
                return j
            continue
        for i in range(nx):
            if not any(all(a == 0 for k, a in enumerate(e[:nx]) if k != i) for e in mine):
                return j
    return None


def is_zero_sheaf(M: GradedModulePresentation) -> bool:
    """True iff the cokernel is annihilated by a power of the irrelevant ideal."""
    return zero_sheaf_witness(M) is None


def is_zero_module(M: GradedModulePresentation) -> bool:
    if M.rank == 0:
        return True
    sub = M.image()
    one = M.ring.field.one()
    return all(sub.contains({(j, M.ring.zero_exp): one}) for j in range(M.rank))


# -- homology and exactness ---------------------------------------------------


def homology(in_cols, mid: GradedModulePresentation, out_cols, target: GradedModulePresentation) -> Subquotient:
    """ker(out)/im(in) at ``mid``, with maps given on generators."""
    K = preimage(out_cols, target, mid.pos_deg) if out_cols is not None else _units(mid)
    return subquotient(mid.ring, mid.pos_deg, K, list(in_cols) + mid.rels)


def _units(M):
    one = M.ring.field.one()
    return [{(j, M.ring.zero_exp): one} for j in range(M.rank)]


def check_complex(in_cols, out_cols, target: GradedModulePresentation) -> bool:
    """out o in lands in the relations of ``target``."""
    sub = target.image()
    ring = target.ring
    return all(sub.contains(apply_columns(out_cols, v, ring)) for v in in_cols)


def exact_at(in_cols, mid, out_cols, target, as_sheaves=True) -> dict:
    """Certificate that ``in -> mid -> out`` is exact at ``mid``."""
    zero_test = is_zero_sheaf if as_sheaves else is_zero_module
    cx = True if out_cols is None else check_complex(in_cols, out_cols, target)
    H = homology(in_cols, mid, out_cols, target)
    ok = cx and zero_test(H.presentation)
    return {"complex": cx, "homology_generators": H.presentation.rank, "exact": ok}


def injective_cert(cols, source, target, as_sheaves=True) -> dict:
    K = preimage(cols, target, source.pos_deg)
    sq = subquotient(source.ring, source.pos_deg, K, source.rels)
    zero_test = is_zero_sheaf if as_sheaves else is_zero_module
    return {"kernel_generators": sq.presentation.rank, "exact": zero_test(sq.presentation)}


def surjective_cert(cols, target, as_sheaves=True) -> dict:
    C = cokernel(target, cols)
    zero_test = is_zero_sheaf if as_sheaves else is_zero_module
    return {"cokernel_generators": C.rank, "exact": zero_test(C)}


def short_exact_cert(A, f_cols, B, g_cols, C, as_sheaves=True) -> dict:
    """Certify 0 -> A -> B -> C -> 0 with maps given on generators."""
    inj = injective_cert(f_cols, A, B, as_sheaves)
    mid = exact_at(f_cols, B, g_cols, C, as_sheaves)
    sur = surjective_cert(g_cols, C, as_sheaves)
    return {"injective": inj, "middle": mid, "surjective": sur, "exact": inj["exact"] and mid["exact"] and sur["exact"]}


# -- free resolutions ---------------------------------------------------------


@dataclass
class FreeResolution:
    """``0 -> F_s -> ... -> F_0``; ``maps[i]`` has the columns of F_{i+1} -> F_i."""

    modules: list  # list of GradedFreeModule
    maps: list  # list of column lists
    certificate: dict

    @property
    def length(self):
        return len(self.modules) - 1

    def twists(self, i):
        return self.modules[i].twists

    def shifted(self, n):
        return FreeResolution([F.twist(n) for F in self.modules], self.maps, self.certificate)


def _minimal_gens(ring, pos_deg, vecs):
    return Submodule(ring, pos_deg, vecs).minimalized().gens


def free_resolution(M: GradedModulePresentation, max_length=None) -> FreeResolution:
    """Free resolution; minimal when the base ring is a field."""
    ring = M.ring
    M, _ = prune(M)
    F0 = M.generators
    modules = [F0]
    maps = []
    gens = _minimal_gens(ring, F0.pos_deg, M.rels) if ring.base.is_field else list(M.rels)
    cap = max_length if max_length is not None else ring.nvars + 2
    pos_deg = F0.pos_deg
    checks = []
    while gens:
        if len(maps) > cap:
            raise Pbk0Error("free resolution did not terminate")
        degs = [vec_wdeg(g, pos_deg, ring) for g in gens]
        Fi = GradedFreeModule(ring, [-d for d in degs])
        modules.append(Fi)
        maps.append(gens)
        syz = syzygies(gens, degs, pos_deg, ring)
        nxt = _minimal_gens(ring, Fi.pos_deg, syz) if ring.base.is_field else syz
        if nxt:
            span = Submodule(ring, Fi.pos_deg, nxt)
            if not all(span.contains(z) for z in syz):
                raise CertificateError("syzygy not contained in the next image")
            for v in nxt:
                if any(apply_columns(gens, v, ring).values()):
                    raise CertificateError("composite of consecutive maps is nonzero")
        checks.append(len(syz))
        gens = nxt
        pos_deg = Fi.pos_deg
    return FreeResolution(modules, maps, {"syzygy_containment": True, "steps": checks})


# -- degree pieces -------------------------------------------------------------


@dataclass
class DegreePiece:
    """``M_d`` as a module over the base ring.

    ``basis`` lists the monomial vectors ``(pos, x-exponent)`` used as
    generators; ``presentation`` lives over ``PolyRing(base, None)``.
    """

    degree: int
    basis: list
    presentation: GradedModulePresentation
    standard: bool  # True when the basis consists of standard monomials (field base)

    @property
    def rank(self):
        return self.presentation.rank


def _monomials_in_degree(M, d):
    ring = M.ring
    out = []
    for j, a in enumerate(M.twists):
        for e in ring.x_monomials(d + a):
            out.append((j, e))
    return out


def degree_piece(M: GradedModulePresentation, d: int) -> DegreePiece:
    ring = M.ring
    base = ring.base_ring()
    sub = M.image()
    gb, order, idx = sub.gb()
    if ring.base.is_field:
        lts = {}
        for p, e in (order.lead(v) for v in gb):
            lts.setdefault(p, []).append(e)
        basis = [t for t in _monomials_in_degree(M, d) if not any(all(a <= b for a, b in zip(e, t[1])) for e in lts.get(t[0], ()))]
        P = GradedModulePresentation.free(base, [0] * len(basis))
        return DegreePiece(d, basis, P, True)
    basis = _monomials_in_degree(M, d)
    where = {(j, e[: ring.nx]): k for k, (j, e) in enumerate(basis)}
    rels = []
    for g in gb:
        dg = vec_wdeg(g, M.pos_deg, ring)
        if dg > d:
            continue
        for mu in ring.x_monomials(d - dg):
            v = {}
            for (p, e), c in g.items():
                ee = ring.normalize_exp(tuple(a + b for a, b in zip(e, mu)))
                key = (where[(p, ee[: ring.nx])], ee[ring.nx:])
                s = ring.field.add(v.get(key, ring.field.zero()), c)
                if s:
                    v[key] = s
                else:
                    v.pop(key, None)
            v = normalize_vec(v, base)
            if v:
                rels.append(v)
    P = GradedModulePresentation.from_vectors(base, [0] * len(basis), rels)
    return DegreePiece(d, basis, P, False)


def hilbert_function(M: GradedModulePresentation, d: int) -> int:
    """dim_k M_d over a field base, by counting standard monomials."""
    if not M.ring.base.is_field:
        raise Pbk0Error("Hilbert functions need a field base")
    return len(degree_piece(M, d).basis)


def coordinates(M: GradedModulePresentation, piece: DegreePiece, v) -> dict:
    """Coordinates of a degree-d element in the standard basis of ``piece``."""
    if not piece.standard:
        raise Pbk0Error("coordinates need a standard-monomial basis")
    ring = M.ring
    rem = M.image().reduce(v)
    where = {t: k for k, t in enumerate(piece.basis)}
    out = {}
    for (p, e), c in rem.items():
        out[where[(p, e)]] = c
    return out


def rank_of_map_in_degree(cols, source_twists, target_twists, ring, d) -> int:
    """Rank over k of the degree-d piece of the map S(a) -> S(b) given by columns."""
    tgt_index = {}
    for j, b in enumerate(target_twists):
        for e in ring.x_monomials(d + b):
            tgt_index[(j, e)] = len(tgt_index)
    rows = []
    for j, a in enumerate(source_twists):
        col = cols[j]
        if not col:
            continue
        for mu in ring.x_monomials(d + a):
            row = {}
            for (p, e), c in col.items():
                key = tgt_index[(p, tuple(x + y for x, y in zip(e, mu)))]
                row[key] = ring.field.add(row.get(key, ring.field.zero()), c)
            row = {k: c for k, c in row.items() if c}
            if row:
                rows.append(row)
    return linalg.rank(rows, ring.field)


def free_dim(twists, ring, d) -> int:
    n = ring.nx
    return sum(comb(d + a + n - 1, n - 1) for a in twists if d + a >= 0)
