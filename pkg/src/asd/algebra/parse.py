"""Parser for rational expressions such as ``"x1^2 - 3/2*x1*x2"`` or
``"x1/x2^2"``.  Only exact rationals are accepted; a decimal point is a
parse error.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Tuple

from ..errors import ParseError
from .mpoly import MPoly
from .series import ExpandableFraction

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    text = text.replace("−", "-")
    pos, out = 0, []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].strip()[0]!r} in {text!r}", column=pos + 1)
        if m.group(1):
            out.append(("num", m.group(1), m.start(1)))
        elif m.group(2):
            out.append(("name", m.group(2), m.start(2)))
        else:
            out.append(("op", "^" if m.group(3) == "**" else m.group(3), m.start(3)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, len(self.text))

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            want = value or "a token"
            raise ParseError(f"expected {want} in {self.text!r}", column=tok[2] + 1)
        self.i += 1
        return tok

    def parse(self):
        if not self.toks:
            raise ParseError("empty expression")
        out = self.expr()
        if self.i != len(self.toks):
            raise ParseError(f"trailing input in {self.text!r}", column=self.peek()[2] + 1)
        return out

    def expr(self):
        num, den = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            n2, d2 = self.term()
            if op == "-":
                n2 = -n2
            if den == d2:
                num = num + n2
            else:
                num, den = num * d2 + n2 * den, den * d2
        return num, den

    def term(self):
        num, den = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            n2, d2 = self.unary()
            if op == "*":
                num, den = num * n2, den * d2
            else:
                if n2.is_zero():
                    raise ParseError(f"division by zero in {self.text!r}")
                num, den = num * d2, den * n2
        if den.is_constant():
            num, den = num * (1 / den.constant_term()), MPoly.const(1)
        return num, den

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            n, d = self.unary()
            return -n, d
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        num, den = self.atom()
        if self.peek()[1] == "^":
            self.take()
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            tok = self.take()
            if tok[0] != "num":
                raise ParseError(f"exponent must be an integer in {self.text!r}", column=tok[2] + 1)
            e = int(tok[1])
            num, den = num ** e, den ** e
            if sign < 0:
                if num.is_zero():
                    raise ParseError(f"division by zero in {self.text!r}")
                num, den = den, num
        return num, den

    def atom(self):
        kind, value, pos = self.take()
        if kind == "num":
            return MPoly.const(int(value)), MPoly.const(1)
        if kind == "name":
            return MPoly.var(value), MPoly.const(1)
        if value == "(":
            out = self.expr()
            self.take(")")
            return out
        raise ParseError(f"unexpected {value!r} in {self.text!r}", column=pos + 1)


def parse_rational(text: str) -> Tuple[MPoly, MPoly]:
    """Parse to an (unreduced) numerator/denominator pair."""
    return _Parser(str(text)).parse()


def parse_poly(text) -> MPoly:
    if isinstance(text, (int, Fraction)):
        return MPoly.const(text)
    num, den = parse_rational(text)
    if not den.is_constant():
        raise ParseError(f"{text!r} is not a polynomial")
    return num * (1 / den.constant_term())


def parse_fraction(text, var: str) -> ExpandableFraction:
    if isinstance(text, (int, Fraction)):
        return ExpandableFraction(var, MPoly.const(text))
    num, den = parse_rational(text)
    return ExpandableFraction.from_quotient(num, den, var)


def parse_scalar(text) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    p = parse_poly(text)
    if not p.is_constant():
        raise ParseError(f"{text!r} is not a rational constant")
    return p.constant_term()
