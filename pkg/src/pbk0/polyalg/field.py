"""Exact coefficient fields: the rationals and prime fields F_p."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpq

from ..errors import Pbk0Error


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """``kind`` is ``"Q"`` or ``"Fp"``; ``p`` is used only for prime fields.

    Rational coefficients are ``gmpy2.mpq``; prime-field coefficients are
    plain ints in ``range(p)``.
    """

    kind: str = "Q"
    p: int = 0

    def __post_init__(self):
        if self.kind == "Q":
            if self.p != 0:
                raise Pbk0Error("the rational field takes no characteristic")
        elif self.kind == "Fp":
            if not (2 <= self.p < 2**31 and _is_prime(self.p)):
                raise Pbk0Error(f"p = {self.p} is not a prime in [2, 2^31)")
        else:
            raise Pbk0Error(f"unknown field kind {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        """Accepts ``q``/``Q``/``QQ`` and ``fp:<p>``."""
        s = text.strip()
        if s.lower() in ("q", "qq"):
            return cls("Q")
        if s.lower().startswith("fp:"):
            try:
                p = int(s[3:])
            except ValueError:
                raise Pbk0Error(f"bad field spec {text!r}") from None
            return cls("Fp", p)
        raise Pbk0Error(f"bad field spec {text!r}")

    @property
    def char(self) -> int:
        return self.p

    @property
    def is_prime(self) -> bool:
        return self.kind == "Fp"

    def __str__(self):
        return "q" if self.kind == "Q" else f"fp:{self.p}"

    def coerce(self, c):
        """Bring an int, Fraction or mpq into the field."""
        if self.p:
            if isinstance(c, int):
                return c % self.p
            c = Fraction(c) if not isinstance(c, Fraction) else c
            num, den = c.numerator % self.p, c.denominator % self.p
            if den == 0:
                raise ZeroDivisionError(f"denominator vanishes mod {self.p}")
            return num * pow(den, -1, self.p) % self.p
        if isinstance(c, Fraction):
            return mpq(c.numerator, c.denominator)
        return mpq(c)

    def zero(self):
        return 0 if self.p else mpq(0)

    def one(self):
        return 1 if self.p else mpq(1)

    def add(self, a, b):
        return (a + b) % self.p if self.p else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.p else a - b

    def mul(self, a, b):
        return a * b % self.p if self.p else a * b

    def neg(self, a):
        return -a % self.p if self.p else -a

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p) if self.p else 1 / a

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def to_text(self, c) -> str:
        if self.p:
            return str(int(c))
        c = mpq(c)
        if c.denominator == 1:
            return str(c.numerator)
        return f"{c.numerator}/{c.denominator}"

    def to_json(self, c):
        return self.to_text(c)


QQ = FieldSpec("Q")


def GF(p: int) -> FieldSpec:
    return FieldSpec("Fp", p)
