"""Buchberger's algorithm for submodules of graded free modules.

Vectors are dicts ``{(pos, exp): coeff}`` where ``exp`` is an exponent tuple
of the ambient PolyRing.  A :class:`ModuleOrder` fixes the monomial order:
weighted x-grevlex first (weight of position ``pos`` is ``pos_deg[pos]``),
then base-grevlex, then position.  Positions below ``n_elim`` form an
elimination block dominating all others; this is what syzygies and lifts
use.
"""

from __future__ import annotations

import threading

from ..errors import Pbk0Error


class ModuleOrder:
    def __init__(self, ring, pos_deg, n_elim=0):
        self.ring = ring
        self.pos_deg = tuple(pos_deg)
        self.n_elim = n_elim
        self._cache = {}

    @property
    def signature(self):
        return (self.ring, self.pos_deg, self.n_elim)

    def key(self, t):
        k = self._cache.get(t)
        if k is None:
            pos, e = t
            nx = self.ring.nx
            xs, bs = e[:nx], e[nx:]
            k = (
                1 if pos < self.n_elim else 0,
                sum(xs) + self.pos_deg[pos],
                tuple(-a for a in reversed(xs)),
                sum(bs),
                tuple(-a for a in reversed(bs)),
                -pos,
            )
            self._cache[t] = k
        return k

    def wdeg(self, t):
        pos, e = t
        return sum(e[: self.ring.nx]) + self.pos_deg[pos]

    def lead(self, v):
        return max(v, key=self.key)


class _Elt:
    __slots__ = ("vec", "lt", "pos", "mono", "deg")

    def __init__(self, vec, order):
        self.vec = vec
        self.lt = order.lead(vec)
        self.pos, self.mono = self.lt
        self.deg = order.wdeg(self.lt)


def _divides(a, b):
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _lcm(a, b):
    return tuple(x if x > y else y for x, y in zip(a, b))


def _coprime(a, b):
    for x, y in zip(a, b):
        if x and y:
            return False
    return True


def make_monic(v, order):
    if not v:
        return v
    fld = order.ring.field
    c = v[order.lead(v)]
    if c == 1:
        return v
    inv = fld.inv(c)
    return {t: fld.mul(a, inv) for t, a in v.items()}


def _sub_multiple(v, c, shift, g, p):
    """v -= c * x^shift * g, in place."""
    for (gp, ge), gc in g.items():
        t = (gp, tuple(a + b for a, b in zip(ge, shift)))
        if p:
            s = (v.get(t, 0) - c * gc) % p
        else:
            s = v.get(t, 0) - c * gc
        if s:
            v[t] = s
        else:
            v.pop(t, None)


def _find_divisor(pos, e, by_pos):
    for g in by_pos.get(pos, ()):
        if _divides(g.mono, e):
            return g
    return None


def reduce_vec(v, basis, order, full=True):
    """Normal form of ``v`` modulo the monic elements in ``basis``."""
    p = order.ring.field.p
    by_pos = basis if isinstance(basis, dict) else _index(basis)
    v = dict(v)
    rem = {}
    key = order.key
    while v:
        t = max(v, key=key)
        pos, e = t
        g = _find_divisor(pos, e, by_pos)
        if g is None:
            if not full:
                rem.update(v)
                return rem
            rem[t] = v.pop(t)
            continue
        c = v[t]
        shift = tuple(b - a for a, b in zip(g.mono, e))
        _sub_multiple(v, c, shift, g.vec, p)
    return rem


def _index(basis):
    by_pos = {}
    for g in basis:
        if not isinstance(g, _Elt):
            raise TypeError("basis elements must be prepared")
        by_pos.setdefault(g.pos, []).append(g)
    return by_pos


def prepare(vecs, order):
    return [_Elt(make_monic(v, order), order) for v in vecs if v]


def buchberger(gens, order, product_criterion=None):
    """Reduced Gröbner basis of the submodule spanned by ``gens``.

    Pairs are handled with the Gebauer–Möller installation of Buchberger's
    chain criterion; the coprime-leading-term criterion is only valid for
    ideals and is applied when the ambient module has rank one.
    """
    fld = order.ring.field
    if product_criterion is None:
        product_criterion = len(order.pos_deg) == 1
    elts = []
    alive = []
    by_pos = {}
    pairs = []  # (deg, key-of-lcm, i, j)
    pending = sorted(
        (v for v in gens if v),
        key=lambda v: min(order.wdeg(t) for t in v),
    )
    pending.reverse()

    def install(vec):
        h = _Elt(make_monic(vec, order), order)
        k = len(elts)
        elts.append(h)
        alive.append(True)
        # Gebauer–Möller
        cand = [i for i in range(k) if alive[i] and elts[i].pos == h.pos]
        lcms = {i: _lcm(elts[i].mono, h.mono) for i in cand}
        keep = []
        remaining = list(cand)
        while remaining:
            i = remaining.pop(0)
            li = lcms[i]
            if product_criterion and _coprime(elts[i].mono, h.mono):
                keep.append(i)
                continue
            dominated = False
            for j in remaining + keep:
                if _divides(lcms[j], li):
                    dominated = True
                    break
            if not dominated:
                keep.append(i)
        new_pairs = [
            i for i in keep
            if not (product_criterion and _coprime(elts[i].mono, h.mono))
        ]
        survivors = []
        for pr in pairs:
            _, _, i, j = pr
            gi, gj = elts[i], elts[j]
            if gi.pos != h.pos:
                survivors.append(pr)
                continue
            lij = _lcm(gi.mono, gj.mono)
            if (
                _divides(h.mono, lij)
                and _lcm(gi.mono, h.mono) != lij
                and _lcm(gj.mono, h.mono) != lij
            ):
                continue
            survivors.append(pr)
        pairs[:] = survivors
        for i in new_pairs:
            lcm = lcms[i]
            t = (h.pos, lcm)
            pairs.append((order.wdeg(t), order.key(t), i, k))
        for i in range(k):
            if alive[i] and elts[i].pos == h.pos and _divides(h.mono, elts[i].mono):
                alive[i] = False
                by_pos[elts[i].pos].remove(elts[i])
        by_pos.setdefault(h.pos, []).append(h)

    p = fld.p
    while pending or pairs:
        next_gen_deg = min(order.wdeg(t) for t in pending[-1]) if pending else None
        if pairs:
            best = min(range(len(pairs)), key=lambda n: pairs[n][:2])
            pair_deg = pairs[best][0]
        else:
            pair_deg = None
        if pending and (pair_deg is None or next_gen_deg <= pair_deg):
            vec = pending.pop()
        else:
            _, _, i, j = pairs.pop(best)
            gi, gj = elts[i], elts[j]
            lcm = _lcm(gi.mono, gj.mono)
            vec = {}
            _sub_multiple(vec, -1 if not p else p - 1, tuple(a - b for a, b in zip(lcm, gi.mono)), gi.vec, p)
            _sub_multiple(vec, 1, tuple(a - b for a, b in zip(lcm, gj.mono)), gj.vec, p)
        r = reduce_vec(vec, by_pos, order, full=False)
        if r:
            install(r)

    basis = [elts[i] for i in range(len(elts)) if alive[i]]
    index = _index(basis)
    out = []
    for g in basis:
        others = {pos: [h for h in lst if h is not g] for pos, lst in index.items()}
        tail = dict(g.vec)
        lc = tail.pop(g.lt)
        red = reduce_vec(tail, others, order, full=True)
        red[g.lt] = lc
        out.append(red)
    out.sort(key=lambda v: order.key(order.lead(v)))
    return out


class GBCache:
    """Thread-safe memo of reduced Gröbner bases keyed by canonical input."""

    def __init__(self, maxsize=4096):
        self._lock = threading.Lock()
        self._data = {}
        self.maxsize = maxsize

    @staticmethod
    def _freeze(vecs):
        return frozenset(frozenset(v.items()) for v in vecs if v)

    def get(self, vecs, order):
        key = (order.signature, self._freeze(vecs))
        with self._lock:
            hit = self._data.get(key)
        if hit is not None:
            return hit
        gb = buchberger(vecs, order)
        with self._lock:
            if len(self._data) >= self.maxsize:
                self._data.clear()
            self._data[key] = gb
        return gb


CACHE = GBCache()


def groebner(vecs, order):
    return CACHE.get(vecs, order)


def relation_vecs(ring, positions):
    """The defining relations t*T - 1 placed in each given position."""
    out = []
    for i, j in ring.laurent_pairs:
        e = [0] * ring.nvars
        e[i] = e[j] = 1
        for pos in positions:
            out.append({(pos, tuple(e)): ring.field.one(), (pos, ring.zero_exp): ring.field.neg(ring.field.one())})
    return out


def normalize_vec(v, ring):
    """Apply Laurent cancellation to every term and drop zeros."""
    if not ring.laurent_pairs:
        return dict(v)
    fld = ring.field
    out = {}
    for (pos, e), c in v.items():
        t = (pos, ring.normalize_exp(e))
        s = fld.add(out.get(t, fld.zero()), c)
        if s:
            out[t] = s
        else:
            out.pop(t, None)
    return out


def vec_wdeg(v, pos_deg, ring):
    degs = {sum(e[: ring.nx]) + pos_deg[pos] for pos, e in v}
    if len(degs) != 1:
        raise Pbk0Error("vector is not homogeneous")
    return degs.pop()


def _augmented(gens, gen_degs, pos_deg, ring):
    s = len(pos_deg)
    aug = []
    one = ring.field.one()
    for i, (g, d) in enumerate(zip(gens, gen_degs)):
        v = dict(g)
        v[(s + i, ring.zero_exp)] = one
        aug.append(v)
    aug.extend(relation_vecs(ring, range(s)))
    order = ModuleOrder(ring, tuple(pos_deg) + tuple(gen_degs), n_elim=s)
    return aug, order


def syzygies(gens, gen_degs, pos_deg, ring):
    """Generators of {c : sum c_i gens_i = 0} (over the ring modulo its relations).

    Returned vectors live in positions 0..len(gens)-1 with position weights
    ``gen_degs``.
    """
    s = len(pos_deg)
    if not gens:
        return []
    aug, order = _augmented(gens, gen_degs, pos_deg, ring)
    gb = groebner(aug, order)
    out = []
    for v in gb:
        pos, _ = order.lead(v)
        if pos < s:
            continue
        if any(p < s for p, _ in v):
            raise Pbk0Error("elimination order violated")
        w = normalize_vec({(p - s, e): c for (p, e), c in v.items()}, ring)
        if w:
            out.append(w)
    return out


def lift(v, gens, gen_degs, pos_deg, ring):
    """Coefficients c with v = sum c_i gens_i modulo ring relations, or None."""
    s = len(pos_deg)
    if not v:
        return [{} for _ in gens]
    if not gens:
        return None
    aug, order = _augmented(gens, gen_degs, pos_deg, ring)
    gb = groebner(aug, order)
    elts = prepare(gb, order)
    rem = reduce_vec(v, _index(elts), order, full=True)
    if any(p < s for p, _ in rem):
        return None
    fld = ring.field
    coeffs = [{} for _ in gens]
    for (p, e), c in rem.items():
        coeffs[p - s][e] = fld.neg(c)
    return [normalize_poly_terms(cf, ring) for cf in coeffs]


def normalize_poly_terms(terms, ring):
    if not ring.laurent_pairs:
        return terms
    fld = ring.field
    out = {}
    for e, c in terms.items():
        e = ring.normalize_exp(e)
        s = fld.add(out.get(e, fld.zero()), c)
        if s:
            out[e] = s
        else:
            out.pop(e, None)
    return out


def submodule_gb(gens, pos_deg, ring):
    """Reduced GB of span(gens) + (ring relations) * F."""
    order = ModuleOrder(ring, pos_deg)
    vecs = [g for g in gens if g] + relation_vecs(ring, range(len(pos_deg)))
    return groebner(vecs, order), order


def reduce_mod(v, gens, pos_deg, ring):
    gb, order = submodule_gb(gens, pos_deg, ring)
    return reduce_vec(v, _index(prepare(gb, order)), order, full=True)
