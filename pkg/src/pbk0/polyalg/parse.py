"""Recursive-descent parser for the polynomial text grammar.

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := integer | integer '/' integer | var | var '^' nat | '(' expr ')'

Variables are x0..x3, t1, t2, T1, T2 (aliases: t -> t1, u -> t2, T -> T1).
"""

from __future__ import annotations

import re
from fractions import Fraction

from ..errors import ParseError

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9]*)|(.))")
ALIASES = {"t": "t1", "u": "t2", "T": "T1"}


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        num, name, op = m.groups()
        start = m.start(1) if num else m.start(2) if name else m.start(3)
        if num is not None:
            tokens.append(("int", int(num), start))
        elif name is not None:
            tokens.append(("var", name, start))
        elif op is not None:
            if op.isspace():
                pos = m.end()
                continue
            if op not in "+-*/^()":
                raise ParseError(text, start, f"unexpected character {op!r}")
            tokens.append(("op", op, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text, ring):
        self.text = text
        self.ring = ring
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg):
        raise ParseError(self.text, self.peek()[2], msg)

    def expect_op(self, op):
        kind, val, _ = self.peek()
        if kind != "op" or val != op:
            self.error(f"expected {op!r}")
        self.take()

    def expr(self):
        sign = 1
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                acc = acc + t if val == "+" else acc - t
            else:
                return acc

    def term(self):
        acc = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                acc = acc * self.factor()
            else:
                return acc

    def nat(self):
        kind, val, _ = self.peek()
        if kind != "int":
            self.error("expected a natural number exponent")
        self.take()
        return val

    def factor(self):
        kind, val, _ = self.peek()
        if kind == "int":
            self.take()
            k2, v2, _ = self.peek()
            if k2 == "op" and v2 == "/":
                self.take()
                k3, den, _ = self.peek()
                if k3 != "int":
                    self.error("expected an integer denominator")
                if den == 0:
                    self.error("zero denominator")
                self.take()
                return self.ring.const(Fraction(val, den))
            return self.ring.const(val)
        if kind == "var":
            name = ALIASES.get(val, val)
            if name not in self.ring.index:
                self.error(f"unknown variable {val!r}")
            self.take()
            p = self.ring.var(name)
            k2, v2, _ = self.peek()
            if k2 == "op" and v2 == "^":
                self.take()
                p = p ** self.nat()
            return p
        if kind == "op" and val == "(":
            self.take()
            p = self.expr()
            self.expect_op(")")
            k2, v2, _ = self.peek()
            if k2 == "op" and v2 == "^":
                self.take()
                p = p ** self.nat()
            return p
        if kind == "end":
            self.error("unexpected end of input")
        self.error(f"unexpected token {val!r}")


def parse_polynomial(text: str, ring):
    p = _Parser(text, ring)
    if p.peek()[0] == "end":
        p.error("empty polynomial")
    out = p.expr()
    if p.peek()[0] != "end":
        p.error(f"unexpected token {p.peek()[1]!r}")
    return out
