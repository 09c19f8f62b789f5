"""Submodule arithmetic on internal vectors: products, colons, intersections."""

from __future__ import annotations

from .gb import (
    ModuleOrder,
    _index,
    normalize_vec,
    prepare,
    reduce_vec,
    submodule_gb,
    syzygies,
    vec_wdeg,
)


def vec_add(u, v, field):
    out = dict(u)
    for t, c in v.items():
        s = field.add(out.get(t, field.zero()), c)
        if s:
            out[t] = s
        else:
            out.pop(t, None)
    return out


def vec_scale(v, c, field):
    if not c:
        return {}
    return {t: field.mul(a, c) for t, a in v.items()}


def vec_neg(v, field):
    return {t: field.neg(a) for t, a in v.items()}


def poly_times_vec(poly, v, ring):
    """poly: dict exp -> coeff; v: vector.  Result normalized."""
    fld = ring.field
    out = {}
    for e1, c1 in poly.items():
        for (pos, e2), c2 in v.items():
            t = (pos, tuple(a + b for a, b in zip(e1, e2)))
            s = fld.add(out.get(t, fld.zero()), fld.mul(c1, c2))
            if s:
                out[t] = s
            else:
                out.pop(t, None)
    return normalize_vec(out, ring)


def combine(coeffs, gens, ring):
    """sum_i coeffs[i] * gens[i] where coeffs are poly dicts."""
    out = {}
    for c, g in zip(coeffs, gens):
        if c and g:
            out = vec_add(out, poly_times_vec(c, g, ring), ring.field)
    return out


def split_vec(v, s):
    """Split a vector on positions [0, s) and [s, ...), re-indexing the tail."""
    head, tail = {}, {}
    for (pos, e), c in v.items():
        if pos < s:
            head[(pos, e)] = c
        else:
            tail[(pos - s, e)] = c
    return head, tail


def vec_to_coeffs(v, n):
    out = [{} for _ in range(n)]
    for (pos, e), c in v.items():
        out[pos][e] = c
    return out


def coeffs_to_vec(coeffs):
    return {(i, e): c for i, cf in enumerate(coeffs) for e, c in cf.items()}


class Submodule:
    """Span of homogeneous vectors inside a graded free module.

    ``pos_deg[j]`` is the degree of the j-th basis vector (minus its twist).
    Membership includes the ring's Laurent relations.
    """

    def __init__(self, ring, pos_deg, gens):
        self.ring = ring
        self.pos_deg = tuple(pos_deg)
        self.gens = [normalize_vec(g, ring) for g in gens]
        self.gens = [g for g in self.gens if g]
        self._gb = None

    @property
    def rank(self):
        return len(self.pos_deg)

    def degrees(self):
        return [vec_wdeg(g, self.pos_deg, self.ring) for g in self.gens]

    def gb(self):
        if self._gb is None:
            gb, order = submodule_gb(self.gens, self.pos_deg, self.ring)
            self._gb = (gb, order, _index(prepare(gb, order)))
        return self._gb

    def reduce(self, v):
        _, order, idx = self.gb()
        return reduce_vec(v, idx, order, full=True)

    def contains(self, v):
        return not self.reduce(v)

    def contains_all(self, other):
        return all(self.contains(g) for g in other.gens)

    def equals(self, other):
        return self.contains_all(other) and other.contains_all(self)

    def leading_terms(self):
        gb, order, _ = self.gb()
        return [order.lead(v) for v in gb]

    def syzygies(self):
        return syzygies(self.gens, self.degrees(), self.pos_deg, self.ring)

    def colon_element(self, h):
        """{v : h*v in self} for a homogeneous polynomial h (dict exp -> coeff)."""
        ring = self.ring
        dh = sum(next(iter(h))[: ring.nx])
        s = self.rank
        cols = []
        degs = []
        for j in range(s):
            cols.append({(j, e): c for e, c in h.items()})
            degs.append(self.pos_deg[j] + dh)
        cols.extend(self.gens)
        degs.extend(self.degrees())
        syz = syzygies(cols, degs, self.pos_deg, ring)
        out = []
        for z in syz:
            head, _ = split_vec(z, s)
            if head:
                out.append(head)
        return Submodule(ring, self.pos_deg, out + self.gens)

    def intersect(self, other):
        ring = self.ring
        a = len(self.gens)
        cols = self.gens + other.gens
        if not self.gens or not other.gens:
            return Submodule(ring, self.pos_deg, [])
        degs = self.degrees() + other.degrees()
        syz = syzygies(cols, degs, self.pos_deg, ring)
        out = []
        for z in syz:
            head, _ = split_vec(z, a)
            w = combine(vec_to_coeffs(head, a), self.gens, ring)
            if w:
                out.append(w)
        return Submodule(ring, self.pos_deg, out)

    def colon_ideal(self, ideal_gens):
        """(self : J) for J generated by homogeneous polynomial dicts."""
        ideal_gens = [h for h in ideal_gens if h]
        if not ideal_gens:
            return Submodule(self.ring, self.pos_deg, [_unit(j, self.ring) for j in range(self.rank)])
        result = None
        for h in ideal_gens:
            q = self.colon_element(h)
            result = q if result is None else result.intersect(q)
        return result.minimalized()

    def minimalized(self):
        """Drop generators lying in the span of the others (greedy by degree)."""
        order = ModuleOrder(self.ring, self.pos_deg)
        gens = sorted(self.gens, key=lambda g: (vec_wdeg(g, self.pos_deg, self.ring), order.key(order.lead(g))))
        kept = []
        for g in gens:
            if not kept or not Submodule(self.ring, self.pos_deg, kept).contains(g):
                kept.append(g)
        return Submodule(self.ring, self.pos_deg, kept)


def _unit(j, ring):
    return {(j, ring.zero_exp): ring.field.one()}
