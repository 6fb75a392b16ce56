"""Text syntax for elements.

Canonical term shape::

    c * g1^e1*g2^e2 * e[2*lam0 - 1*lam1]

The parser accepts any sum/product/power expression built from rationals,
generator names, ``e[...]`` exponents and parentheses; products are taken
left to right with Koszul signs.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .algebra import Element, GradedAlgebra, Monomial
from .errors import ParseError
from .novikov import format_exponent

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_']*(?:\.[A-Za-z_][A-Za-z0-9_']*)?)|(\S))")


def tokenize(text: str, line=None, col0=0):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        col = col0 + m.start(m.lastindex) + 1
        if m.group(1) is not None:
            toks.append(("int", int(m.group(1)), col))
        elif m.group(2) is not None:
            toks.append(("name", m.group(2), col))
        else:
            toks.append(("op", m.group(3), col))
        pos = m.end()
    toks.append(("end", None, col0 + len(text) + 1))
    return toks


class _Parser:
    def __init__(self, text, alg: GradedAlgebra, line=None, col0=0):
        self.toks = tokenize(text, line, col0)
        self.i = 0
        self.alg = alg
        self.line = line

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.line, tok[2])

    def expect(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            self.error(f"expected {op!r}", t)
        return t

    def parse(self) -> Element:
        val = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected {self.peek()[1]!r}")
        return val

    def expr(self) -> Element:
        sign = 1
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            sign = -1 if t[1] == "-" else 1
        acc = self.term() * sign
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                rhs = self.term()
                acc = acc + rhs if t[1] == "+" else acc - rhs
            else:
                return acc

    def term(self) -> Element:
        acc = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            acc = acc * self.factor()
        return acc

    def factor(self) -> Element:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            t = self.take()
            if t[0] != "int":
                self.error("exponent must be a non-negative integer", t)
            return base ** t[1]
        return base

    def number(self) -> Fraction:
        t = self.take()
        num = t[1]
        if self.peek()[0] == "op" and self.peek()[1] == "/":
            self.take()
            d = self.take()
            if d[0] != "int":
                self.error("malformed rational coefficient", d)
            if d[1] == 0:
                self.error("zero denominator", d)
            return Fraction(num, d[1])
        return Fraction(num)

    def atom(self) -> Element:
        t = self.peek()
        if t[0] == "int":
            return self.alg.unit() * self.number()
        if t[0] == "name":
            self.take()
            nxt = self.peek()
            if t[1] == "e" and nxt[0] == "op" and nxt[1] == "[":
                self.take()
                lam = self.lincomb()
                self.expect("]")
                return self.alg.e(lam)
            if t[1] not in self.alg._pos:
                self.error(f"unknown generator {t[1]!r}", t)
            return self.alg.g(t[1])
        if t[0] == "op" and t[1] == "(":
            self.take()
            v = self.expr()
            self.expect(")")
            return v
        self.error(f"unexpected {t[1]!r}" if t[0] != "end" else "unexpected end of input")

    def lincomb(self):
        basis = self.alg.basis
        vec = [0] * len(basis)
        sign = 1
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            sign = -1 if t[1] == "-" else 1
        while True:
            t = self.take()
            coef = 1
            if t[0] == "int":
                coef = t[1]
                if self.peek()[0] == "op" and self.peek()[1] == "*":
                    self.take()
                    t = self.take()
                elif coef == 0:
                    t = None
                else:
                    self.error("expected '*' after class multiplicity")
            if t is not None:
                if t[0] != "name":
                    self.error("expected a class name", t)
                if t[1] not in basis._index:
                    self.error(f"unknown class {t[1]!r}", t)
                vec[basis.index(t[1])] += sign * coef
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] in "+-":
                self.take()
                sign = -1 if nxt[1] == "-" else 1
                continue
            return tuple(vec)


def parse_element(text: str, alg: GradedAlgebra, line=None, col0=0) -> Element:
    return _Parser(text, alg, line, col0).parse()


def format_coefficient(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(alg: GradedAlgebra, m: Monomial) -> str:
    parts = []
    for i, p in m.factors:
        name = alg.generators[i].name
        parts.append(name if p == 1 else f"{name}^{p}")
    word = "*".join(parts)
    pieces = [word] if word else []
    if any(m.exp):
        pieces.append(f"e[{format_exponent(m.exp, alg.basis)}]")
    return " * ".join(pieces)


def sort_key(alg: GradedAlgebra, m: Monomial):
    return (alg.word_len(m), m.factors, m.exp)


def format_element(a: Element) -> str:
    if not a.terms:
        return "0"
    alg = a.alg
    out = []
    for m in sorted(a.terms, key=lambda m: sort_key(alg, m)):
        c = a.terms[m]
        body = format_monomial(alg, m)
        mag = abs(c)
        if not body:
            text = format_coefficient(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{format_coefficient(mag)} * {body}"
        if not out:
            out.append(("-" if c < 0 else "") + text)
        else:
            out.append(("- " if c < 0 else "+ ") + text)
    return " ".join(out)
