"""Catalog base rings, the polynomial rings A[x0..xr] over them, and polynomials."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

from ..errors import Pbk0Error, RingMismatchError
from .field import QQ, FieldSpec

BASE_VARIABLES = ("t1", "t2")
_INVERSE_NAME = {"t1": "T1", "t2": "T2"}


@dataclass(frozen=True)
class BaseRingSpec:
    """One of the catalog rings k, k[t1], k[t1,t2], k[t1,t1^-1].

    An inverted variable t contributes an auxiliary variable T together with
    the relation t*T - 1.
    """

    field: FieldSpec = QQ
    variables: tuple = ()
    inverted: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "inverted", tuple(self.inverted))
        if self.variables not in ((), ("t1",), ("t1", "t2")):
            raise Pbk0Error(f"base variables {self.variables} not in catalog")
        if self.inverted not in ((), ("t1",)):
            raise Pbk0Error(f"inverted variables {self.inverted} not in catalog")
        if self.inverted and self.variables != ("t1",):
            raise Pbk0Error("only k[t1, t1^-1] is allowed as a Laurent base")

    @property
    def is_field(self) -> bool:
        return not self.variables

    @property
    def aux_variables(self) -> tuple:
        return tuple(_INVERSE_NAME[v] for v in self.inverted)

    def with_field(self, field: FieldSpec) -> "BaseRingSpec":
        return BaseRingSpec(field, self.variables, self.inverted)

    def __str__(self):
        if not self.variables:
            return "k"
        parts = list(self.variables) + [f"{v}^-1" for v in self.inverted]
        return "k[" + ",".join(parts) + "]"

    @classmethod
    def parse(cls, text: str, field: FieldSpec = QQ) -> "BaseRingSpec":
        s = text.replace(" ", "")
        s = s.replace("t^-1", "t1^-1").replace("k[t,", "k[t1,").replace("k[t]", "k[t1]")
        s = s.replace(",u]", ",t2]")
        if s == "k":
            return cls(field)
        m = re.fullmatch(r"k\[([^\]]*)\]", s)
        if not m:
            raise Pbk0Error(f"unknown base ring {text!r}")
        variables, inverted = [], []
        for part in m.group(1).split(","):
            if part.endswith("^-1"):
                inverted.append(part[:-3])
            else:
                variables.append(part)
        return cls(field, tuple(variables), tuple(inverted))


@dataclass(frozen=True)
class PolyRing:
    """A[x0..xr] graded by x-degree; ``r=None`` gives the base ring A itself.

    Variable order in exponent vectors: x0..xr, then the base variables,
    then auxiliary inverse variables.
    """

    base: BaseRingSpec
    r: int | None = 1

    def __post_init__(self):
        if self.r is not None and not (0 <= self.r <= 3):
            raise Pbk0Error(f"r = {self.r} out of range")

    @property
    def field(self) -> FieldSpec:
        return self.base.field

    @cached_property
    def nx(self) -> int:
        return 0 if self.r is None else self.r + 1

    @cached_property
    def names(self) -> tuple:
        xs = tuple(f"x{i}" for i in range(self.nx))
        return xs + self.base.variables + self.base.aux_variables

    @cached_property
    def nvars(self) -> int:
        return len(self.names)

    @cached_property
    def index(self) -> dict:
        return {n: i for i, n in enumerate(self.names)}

    @cached_property
    def laurent_pairs(self) -> tuple:
        pairs = []
        for v in self.base.inverted:
            pairs.append((self.index[v], self.index[_INVERSE_NAME[v]]))
        return tuple(pairs)

    @cached_property
    def zero_exp(self) -> tuple:
        return (0,) * self.nvars

    def base_ring(self) -> "PolyRing":
        return PolyRing(self.base, None)

    def fiber_ring(self, r: int) -> "PolyRing":
        return PolyRing(self.base, r)

    def with_field(self, field: FieldSpec) -> "PolyRing":
        return PolyRing(self.base.with_field(field), self.r)

    def normalize_exp(self, e: tuple) -> tuple:
        """Cancel t*T against the Laurent relation."""
        if not self.laurent_pairs:
            return e
        e = list(e)
        for i, j in self.laurent_pairs:
            m = min(e[i], e[j])
            if m:
                e[i] -= m
                e[j] -= m
        return tuple(e)

    def xdeg(self, e: tuple) -> int:
        return sum(e[: self.nx])

    def has_base(self, e: tuple) -> bool:
        return any(e[self.nx:])

    def mono_key(self, e: tuple):
        """Sort key for the block order: x-grevlex, then base-grevlex."""
        nx = self.nx
        xs, bs = e[:nx], e[nx:]
        return (sum(xs), tuple(-a for a in reversed(xs)), sum(bs), tuple(-a for a in reversed(bs)))

    # -- constructors -------------------------------------------------------

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.const(1)

    def const(self, c) -> "Polynomial":
        return Polynomial(self, {self.zero_exp: c})

    def var(self, name: str) -> "Polynomial":
        if name not in self.index:
            raise Pbk0Error(f"ring {self} has no variable {name!r}")
        e = [0] * self.nvars
        e[self.index[name]] = 1
        return Polynomial(self, {tuple(e): 1})

    def x(self, i: int) -> "Polynomial":
        return self.var(f"x{i}")

    def monomial(self, e, c=1) -> "Polynomial":
        return Polynomial(self, {tuple(e): c})

    def gens(self) -> list:
        return [self.x(i) for i in range(self.nx)]

    def parse(self, text: str) -> "Polynomial":
        from .parse import parse_polynomial

        return parse_polynomial(text, self)

    def x_monomials(self, d: int) -> list:
        """Exponent vectors of the x-monomials of degree d, largest first."""
        if d < 0:
            return []
        out = []

        def rec(i, left, acc):
            if i == self.nx - 1:
                out.append(tuple(acc + [left]) + (0,) * (self.nvars - self.nx))
                return
            for a in range(left, -1, -1):
                rec(i + 1, left - a, acc + [a])

        if self.nx == 0:
            return [self.zero_exp] if d == 0 else []
        rec(0, d, [])
        return out

    def __str__(self):
        if self.r is None:
            return str(self.base)
        return f"{self.base}[x0..x{self.r}]"


class Polynomial:
    """Immutable polynomial: a map exponent-vector -> nonzero coefficient."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolyRing, terms: dict, _normalized: bool = False):
        self.ring = ring
        if _normalized:
            self.terms = terms
        else:
            fld = ring.field
            clean = {}
            for e, c in terms.items():
                c = fld.coerce(c)
                if not c:
                    continue
                e = ring.normalize_exp(tuple(e))
                if e in clean:
                    s = fld.add(clean[e], c)
                    if s:
                        clean[e] = s
                    else:
                        del clean[e]
                else:
                    clean[e] = c
            self.terms = clean
        self._hash = None

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self):
        return self.terms.get(self.ring.zero_exp, self.ring.field.zero())

    def has_base_vars(self) -> bool:
        return any(self.ring.has_base(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        return len({self.ring.xdeg(e) for e in self.terms}) <= 1

    def xdegree(self):
        """x-degree of a homogeneous polynomial, ``None`` for zero."""
        degs = {self.ring.xdeg(e) for e in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise Pbk0Error(f"{self} is not homogeneous")
        return degs.pop()

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda t: self.ring.mono_key(t[0]), reverse=True)

    def leading_exp(self):
        return max(self.terms, key=self.ring.mono_key) if self.terms else None

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other):
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise RingMismatchError(f"{self.ring} vs {other.ring}")
            return other
        return self.ring.const(other)

    def __add__(self, other):
        other = self._check(other)
        fld = self.ring.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            if e in out:
                s = fld.add(out[e], c)
                if s:
                    out[e] = s
                else:
                    del out[e]
            else:
                out[e] = c
        return Polynomial(self.ring, out, True)

    __radd__ = __add__

    def __neg__(self):
        fld = self.ring.field
        return Polynomial(self.ring, {e: fld.neg(c) for e, c in self.terms.items()}, True)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        fld = self.ring.field
        norm = self.ring.normalize_exp
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = norm(tuple(a + b for a, b in zip(e1, e2)))
                c = fld.mul(c1, c2)
                if e in out:
                    s = fld.add(out[e], c)
                    if s:
                        out[e] = s
                    else:
                        del out[e]
                else:
                    out[e] = c
        return Polynomial(self.ring, out, True)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = self.ring.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def scale(self, c):
        fld = self.ring.field
        c = fld.coerce(c)
        if not c:
            return self.ring.zero()
        return Polynomial(self.ring, {e: fld.mul(v, c) for e, v in self.terms.items()}, True)

    def mul_exp(self, m: tuple):
        norm = self.ring.normalize_exp
        return Polynomial(self.ring, {norm(tuple(a + b for a, b in zip(e, m))): c for e, c in self.terms.items()})

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, int):
            return self == self.ring.const(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    # -- conversion ---------------------------------------------------------

    def map_to(self, target: PolyRing) -> "Polynomial":
        """Rename variables into ``target`` by name; missing names must have exponent 0."""
        idx = [target.index.get(n) for n in self.ring.names]
        out = {}
        for e, c in self.terms.items():
            new = [0] * target.nvars
            for i, a in enumerate(e):
                if a:
                    if idx[i] is None:
                        raise RingMismatchError(f"variable {self.ring.names[i]} missing in {target}")
                    new[idx[i]] = a
            out[tuple(new)] = c
        return Polynomial(target, out)

    def __str__(self):
        if not self.terms:
            return "0"
        fld = self.ring.field
        pieces = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                (n if a == 1 else f"{n}^{a}") for n, a in zip(self.ring.names, e) if a
            )
            neg = False
            if not fld.p and c < 0:
                neg, c = True, -c
            cs = fld.to_text(c)
            if mono:
                body = mono if cs == "1" else f"{cs}*{mono}"
            else:
                body = cs
            pieces.append(("-" if neg else "+", body))
        s = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            s += f" {sign} {body}"
        return s

    __repr__ = __str__
