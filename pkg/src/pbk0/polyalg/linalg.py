"""Exact sparse Gaussian elimination over a FieldSpec.

Rows are dicts ``{column: nonzero coefficient}``.
"""

from __future__ import annotations


class EchelonBasis:
    """Incrementally maintained reduced row echelon form.

    Pivot columns are chosen as the smallest column index of each row, so
    reducing a vector leaves coordinates only in non-pivot columns.
    """

    def __init__(self, field):
        self.field = field
        self.rows = {}  # pivot column -> row (monic at pivot)

    def __len__(self):
        return len(self.rows)

    @property
    def pivots(self):
        return sorted(self.rows)

    def reduce(self, vec: dict) -> dict:
        """Remainder of ``vec`` modulo the span, free of pivot columns."""
        fld = self.field
        p = fld.p
        v = dict(vec)
        for col in sorted(c for c in v if c in self.rows):
            c = v.get(col)
            if not c:
                continue
            for j, a in self.rows[col].items():
                if p:
                    s = (v.get(j, 0) - c * a) % p
                else:
                    s = v.get(j, 0) - c * a
                if s:
                    v[j] = s
                else:
                    v.pop(j, None)
        return v

    def add(self, vec: dict) -> bool:
        """Insert ``vec``; returns False if it was already in the span."""
        fld = self.field
        v = self.reduce(vec)
        if not v:
            return False
        piv = min(v)
        inv = fld.inv(v[piv])
        v = {j: fld.mul(a, inv) for j, a in v.items()}
        for col, row in self.rows.items():
            c = row.get(piv)
            if c:
                for j, a in v.items():
                    s = fld.sub(row.get(j, fld.zero()), fld.mul(c, a))
                    if s:
                        row[j] = s
                    else:
                        row.pop(j, None)
        self.rows[piv] = v
        return True

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)


def rank(rows, field) -> int:
    eb = EchelonBasis(field)
    for r in rows:
        eb.add(r)
    return len(eb)


def rref(rows, field) -> EchelonBasis:
    eb = EchelonBasis(field)
    for r in rows:
        eb.add(r)
    return eb


def nullspace(rows, ncols, field) -> list:
    """Basis of {v : row . v = 0 for every row}, as dicts."""
    eb = rref(rows, field)
    pivots = set(eb.rows)
    out = []
    for free in range(ncols):
        if free in pivots:
            continue
        v = {free: field.one()}
        for piv, row in eb.rows.items():
            c = row.get(free)
            if c:
                v[piv] = field.neg(c)
        out.append(v)
    return out
