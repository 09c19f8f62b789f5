"""User-facing Gröbner operations on Polynomials and polynomial vectors.

A module element is a Polynomial (rank-one case) or a sequence of
Polynomials (a column of a free module ``S(a_1) + ... + S(a_s)`` with
twists given by ``twists``, all zero by default).
"""

from __future__ import annotations

from ..errors import InhomogeneousError, Pbk0Error, RingMismatchError
from .gb import ModuleOrder, _index, prepare, reduce_vec, submodule_gb, syzygies
from .ring import Polynomial
from .submod import Submodule


def _shape(elems):
    rank = None
    ring = None
    scalar = None
    for x in elems:
        if isinstance(x, Polynomial):
            r, rg, sc = 1, x.ring, True
        else:
            x = tuple(x)
            if not x:
                raise Pbk0Error("empty vector")
            r, rg, sc = len(x), x[0].ring, False
            if any(p.ring != rg for p in x):
                raise RingMismatchError("entries of a vector live in different rings")
        if rank is None:
            rank, ring, scalar = r, rg, sc
        elif r != rank:
            raise Pbk0Error("vectors of different ranks")
        elif rg != ring:
            raise RingMismatchError(f"{rg} vs {ring}")
    return rank, ring, scalar


def to_vec(x):
    if isinstance(x, Polynomial):
        return {(0, e): c for e, c in x.terms.items()}
    return {(i, e): c for i, p in enumerate(x) for e, c in p.terms.items()}


def from_vec(v, ring, rank, scalar):
    entries = [{} for _ in range(rank)]
    for (pos, e), c in v.items():
        entries[pos][e] = c
    polys = [Polynomial(ring, t) for t in entries]
    return polys[0] if scalar else tuple(polys)


def _pos_deg(rank, twists):
    twists = [0] * rank if twists is None else list(twists)
    if len(twists) != rank:
        raise Pbk0Error("twists do not match the rank")
    return [-a for a in twists]


def check_homogeneous(vecs, pos_deg, ring):
    degs = []
    for i, v in enumerate(vecs):
        ds = {sum(e[: ring.nx]) + pos_deg[pos] for pos, e in v}
        if len(ds) > 1:
            raise InhomogeneousError(i)
        degs.append(ds.pop() if ds else None)
    return degs


def _prepare(gens, twists):
    rank, ring, scalar = _shape(gens)
    vecs = [to_vec(g) for g in gens]
    pos_deg = _pos_deg(rank, twists)
    check_homogeneous(vecs, pos_deg, ring)
    return rank, ring, scalar, vecs, pos_deg


def groebner_basis(gens, twists=None):
    """Reduced Gröbner basis (block grevlex, position last), monic and sorted."""
    gens = list(gens)
    if not gens:
        return []
    rank, ring, scalar, vecs, pos_deg = _prepare(gens, twists)
    gb, _ = submodule_gb(vecs, pos_deg, ring)
    return [from_vec(v, ring, rank, scalar) for v in gb]


def normal_form(f, G, twists=None):
    """Remainder of ``f`` on division by the Gröbner basis ``G``."""
    G = list(G)
    rank, ring, scalar = _shape([f] + G)
    pos_deg = _pos_deg(rank, twists)
    order = ModuleOrder(ring, pos_deg)
    vecs = [to_vec(g) for g in G if (g if scalar else any(g))]
    rem = reduce_vec(to_vec(f), _index(prepare(vecs, order)), order)
    return from_vec(rem, ring, rank, scalar)


def syzygy_basis(gens, twists=None):
    """Generators of the relations sum c_i gens_i = 0, as coefficient tuples.

    Every returned syzygy is verified by substitution.
    """
    gens = list(gens)
    if not gens:
        return []
    rank, ring, scalar, vecs, pos_deg = _prepare(gens, twists)
    degs = []
    for v in vecs:
        degs.append(sum(next(iter(v))[1][: ring.nx]) + pos_deg[next(iter(v))[0]] if v else 0)
    out = []
    zero_idx = [i for i, v in enumerate(vecs) if not v]
    nz = [i for i, v in enumerate(vecs) if v]
    for z in syzygies([vecs[i] for i in nz], [degs[i] for i in nz], pos_deg, ring):
        full = {}
        for (p, e), c in z.items():
            full[(nz[p], e)] = c
        out.append(from_vec(full, ring, len(gens), False))
    for i in zero_idx:
        out.append(tuple(ring.one() if j == i else ring.zero() for j in range(len(gens))))
    for syz in out:
        total = [ring.zero()] * rank
        for c, g in zip(syz, gens):
            if scalar:
                total[0] = total[0] + c * g
            else:
                total = [a + c * b for a, b in zip(total, g)]
        if any(not p.is_zero() for p in total):
            raise Pbk0Error("syzygy failed substitution check")
    return out


def submodule_quotient(N, J, twists=None):
    """Generators of (N : J) = {v : v*J in N}."""
    N = list(N)
    J = list(J)
    rank, ring, scalar = _shape(N + [x for x in ([] if not N else [])] or [J[0]])
    pos_deg = _pos_deg(rank, twists)
    vecs = [to_vec(g) for g in N]
    check_homogeneous(vecs, pos_deg, ring)
    check_homogeneous([to_vec(h) for h in J], [0], ring)
    sub = Submodule(ring, pos_deg, vecs)
    q = sub.colon_ideal([h.terms for h in J])
    gb, _ = submodule_gb(q.gens, pos_deg, ring)
    return [from_vec(v, ring, rank, scalar) for v in gb]
