"""Univariate polynomials over Q: square-free parts, rational roots and
symbolic tags for the irrational remainder.

Polynomials here are dense coefficient lists, lowest degree first.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import List, Sequence, Tuple

Dense = List[Fraction]


def trim(p: Sequence) -> Dense:
    p = [Fraction(c) for c in p]
    while p and not p[-1]:
        p.pop()
    return p


def monic(p: Sequence) -> Dense:
    p = trim(p)
    return [c / p[-1] for c in p] if p else p


def pmul(a: Sequence, b: Sequence) -> Dense:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim(out)


def pdivmod(a: Sequence, b: Sequence) -> Tuple[Dense, Dense]:
    a, b = trim(a), trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    r = list(a)
    while len(r) >= len(b) and r:
        k = len(r) - len(b)
        c = r[-1] / b[-1]
        q[k] = c
        for i, y in enumerate(b):
            r[i + k] -= c * y
        r = trim(r)
    return trim(q), r


def pgcd(a: Sequence, b: Sequence) -> Dense:
    a, b = trim(a), trim(b)
    while b:
        a, b = b, pdivmod(a, b)[1]
    return monic(a)


def pderiv(p: Sequence) -> Dense:
    return trim([c * i for i, c in enumerate(p)][1:])


def peval(p: Sequence, x):
    acc = 0 * x
    for c in reversed(p):
        acc = acc * x + c
    return acc


def squarefree_decomposition(p: Sequence) -> List[Tuple[Dense, int]]:
    """Yun's algorithm: ``p = c * prod f_i^i`` with the f_i square-free and coprime."""
    p = monic(p)
    out = []
    if len(p) <= 1:
        return out
    a = pgcd(p, pderiv(p))
    b = pdivmod(p, a)[0]
    c = pdivmod(pderiv(p), a)[0]
    d = trim([x - y for x, y in _pad(c, pderiv(b))])
    i = 1
    while len(b) > 1:
        g = pgcd(b, d)
        if len(g) > 1:
            out.append((g, i))
        b = pdivmod(b, g)[0]
        c = pdivmod(d, g)[0]
        d = trim([x - y for x, y in _pad(c, pderiv(b))])
        i += 1
    return out


def _pad(a, b):
    n = max(len(a), len(b))
    return zip(list(a) + [Fraction(0)] * (n - len(a)), list(b) + [Fraction(0)] * (n - len(b)))


def _divisors(n: int) -> List[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def rational_roots(p: Sequence) -> List[Fraction]:
    """Distinct rational roots, ascending."""
    p = trim(p)
    if not p:
        raise ValueError("zero polynomial")
    roots = set()
    while p and not p[0]:
        roots.add(Fraction(0))
        p = p[1:]
    if len(p) <= 1:
        return sorted(roots)
    den = 1
    for c in p:
        den = lcm(den, c.denominator)
    ints = [int(c * den) for c in p]
    g = 0
    for c in ints:
        g = gcd(g, c)
    ints = [c // g for c in ints]
    for q in _divisors(ints[-1]):
        for r in _divisors(ints[0]):
            for cand in (Fraction(r, q), Fraction(-r, q)):
                if cand not in roots and peval(ints, cand) == 0:
                    roots.add(cand)
    return sorted(roots)


@dataclass(frozen=True)
class AlgebraicTag:
    """An irrational algebraic number named only by its minimal polynomial.

    No root is selected: the tag stands for the whole conjugacy class.
    """

    minpoly: Tuple[Fraction, ...]  # monic, lowest degree first

    def __post_init__(self):
        mp = tuple(monic(self.minpoly))
        if len(mp) < 3:
            raise ValueError("degree-1 algebraic numbers are rationals; use Fraction")
        object.__setattr__(self, "minpoly", mp)

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1

    def poly_string(self, name: str = "s") -> str:
        from .mpoly import from_univariate

        return str(from_univariate(list(self.minpoly), name))

    def __str__(self):
        return f"root({self.poly_string()})"


def irreducible_factors(p: Sequence) -> List[Tuple[Dense, int]]:
    """Factor ``p`` over Q as ``c * prod f^e`` (monic f).

    Linear factors come from the rational root search; the remaining
    square-free cofactors are irreducible when of degree <= 3 (no
    rational root); larger ones are split with sympy.
    """
    out: List[Tuple[Dense, int]] = []
    for f, e in squarefree_decomposition(p):
        rest = f
        for r in rational_roots(f):
            out.append(([-r, Fraction(1)], e))
            rest = pdivmod(rest, [-r, Fraction(1)])[0]
        rest = monic(rest)
        if len(rest) <= 1:
            continue
        if len(rest) <= 4:
            out.append((rest, e))
        else:
            for g in _sympy_factor(rest):
                out.append((g, e))
    out.sort(key=lambda fe: (len(fe[0]), -fe[0][0] if len(fe[0]) == 2 else 0, list(fe[0])))
    return out


def _sympy_factor(p: Dense) -> List[Dense]:
    import sympy

    s = sympy.Symbol("s")
    poly = sympy.Poly(sum(sympy.Rational(c.numerator, c.denominator) * s ** i for i, c in enumerate(p)), s)
    out = []
    for g, _ in poly.factor_list()[1]:
        coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(g.all_coeffs())]
        out.append(monic(coeffs))
    return out


def eigen_factors(p: Sequence):
    """Split the roots of ``p`` into rationals and algebraic tags, with
    multiplicities: list of ``(Fraction | AlgebraicTag, factor, exponent)``."""
    out = []
    for f, e in irreducible_factors(p):
        if len(f) == 2:
            out.append((-f[0] / f[1], f, e))
        else:
            out.append((AlgebraicTag(tuple(f)), f, e))
    return out
