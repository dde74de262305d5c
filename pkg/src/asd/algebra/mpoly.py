"""Sparse multivariate polynomials over the rationals.

A monomial is a tuple of ``(variable, exponent)`` pairs sorted by
:func:`var_key`, with every exponent positive.  The empty tuple is the
unit monomial.  Polynomials never store zero coefficients.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import total_ordering
from typing import Dict, Iterable, Iterator, Mapping, Tuple, Union

from ..errors import UnknownVariable

Monomial = Tuple[Tuple[str, int], ...]
Number = Union[int, Fraction]

_VAR_RE = re.compile(r"^(\D*)(\d*)$")


def var_key(name: str):
    """Natural ordering of variable names: x2 < x10, x* < y*."""
    m = _VAR_RE.match(name)
    prefix, digits = (m.group(1), m.group(2)) if m else (name, "")
    return (prefix, int(digits) if digits else -1, name)


def scalar(value) -> Fraction:
    """Coerce ints, Fractions and rational strings (``"-3/2"``) to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip().replace("−", "-"))
    raise TypeError(f"not an exact rational: {value!r}")


def format_scalar(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for v, e in b:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items(), key=lambda ve: var_key(ve[0])))


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


@total_ordering
class MPoly:
    """Immutable sparse polynomial with Fraction coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Number] | None = None):
        clean: Dict[Monomial, Fraction] = {}
        if terms:
            for mono, c in terms.items():
                c = scalar(c)
                if c:
                    clean[mono] = c
        self._terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def const(cls, c) -> "MPoly":
        return cls({(): scalar(c)})

    @classmethod
    def var(cls, name: str, power: int = 1) -> "MPoly":
        if power == 0:
            return cls.const(1)
        return cls({((name, power),): Fraction(1)})

    @classmethod
    def monomial(cls, exps: Mapping[str, int], c=1) -> "MPoly":
        mono = tuple(sorted(((v, e) for v, e in exps.items() if e), key=lambda ve: var_key(ve[0])))
        return cls({mono: scalar(c)})

    @classmethod
    def _raw(cls, terms: Dict[Monomial, Fraction]) -> "MPoly":
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @staticmethod
    def coerce(x) -> "MPoly":
        if isinstance(x, MPoly):
            return x
        return MPoly.const(x)

    # -- basic queries ------------------------------------------------
    @property
    def terms(self) -> Dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterable[Tuple[Monomial, Fraction]]:
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not m for m in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((), Fraction(0))

    def as_constant(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.constant_term()

    @property
    def variables(self) -> Tuple[str, ...]:
        names = {v for m in self._terms for v, _ in m}
        return tuple(sorted(names, key=var_key))

    def degree(self, var: str | None = None) -> int:
        """Total degree, or degree in ``var``.  The zero polynomial has degree -1."""
        if not self._terms:
            return -1
        if var is None:
            return max(_mono_degree(m) for m in self._terms)
        return max(dict(m).get(var, 0) for m in self._terms)

    def degree_in(self, names: Iterable[str]) -> int:
        names = set(names)
        if not self._terms:
            return -1
        return max(sum(e for v, e in m if v in names) for m in self._terms)

    def valuation(self, var: str) -> int | None:
        """Smallest exponent of ``var`` occurring; ``None`` for zero."""
        if not self._terms:
            return None
        return min(dict(m).get(var, 0) for m in self._terms)

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        other = MPoly.coerce(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return MPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return MPoly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-MPoly.coerce(other))

    def __rsub__(self, other):
        return MPoly.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            try:
                c = scalar(other)
            except TypeError:
                return NotImplemented
            if not c:
                return MPoly()
            return MPoly._raw({m: v * c for m, v in self._terms.items()})
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return MPoly._raw(out)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        c = scalar(other)
        return self * (1 / c)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("MPoly powers must be non-negative integers")
        result, base = MPoly.const(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, MPoly):
            return self._terms == other._terms
        try:
            return self._terms == MPoly.const(other)._terms
        except TypeError:
            return NotImplemented

    def __lt__(self, other):
        return self.sort_key() < MPoly.coerce(other).sort_key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- calculus and substitution ------------------------------------
    def diff(self, var: str, times: int = 1) -> "MPoly":
        p = self
        for _ in range(times):
            out: Dict[Monomial, Fraction] = {}
            for m, c in p._terms.items():
                d = dict(m)
                e = d.get(var, 0)
                if not e:
                    continue
                if e == 1:
                    del d[var]
                else:
                    d[var] = e - 1
                mono = tuple(sorted(d.items(), key=lambda ve: var_key(ve[0])))
                out[mono] = out.get(mono, 0) + c * e
            p = MPoly({k: v for k, v in out.items()})
        return p

    def euler(self, var: str) -> "MPoly":
        """Apply ``var * d/dvar`` (scales each term by its exponent)."""
        return MPoly._raw({m: c * dict(m)[var] for m, c in self._terms.items() if dict(m).get(var)})

    def evaluate(self, values: Mapping[str, Number]) -> "MPoly":
        """Partial evaluation at rational values."""
        values = {k: scalar(v) for k, v in values.items()}
        out: Dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            keep = []
            for v, e in m:
                if v in values:
                    c = c * values[v] ** e
                else:
                    keep.append((v, e))
            if not c:
                continue
            mono = tuple(keep)
            s = out.get(mono, 0) + c
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        return MPoly._raw(out)

    def substitute(self, bindings: Mapping[str, "MPoly"], strict: Iterable[str] | None = None) -> "MPoly":
        """Replace variables by polynomials.  Unbound variables stay put.

        If ``strict`` is given, every variable of ``self`` must be bound
        or listed there, otherwise :class:`UnknownVariable` is raised.
        """
        if strict is not None:
            allowed = set(strict) | set(bindings)
            missing = [v for v in self.variables if v not in allowed]
            if missing:
                raise UnknownVariable(f"unbound variables: {', '.join(missing)}")
        bound = {k: MPoly.coerce(v) for k, v in bindings.items()}
        cache: Dict[Tuple[str, int], MPoly] = {}
        result = MPoly()
        for m, c in self._terms.items():
            term = MPoly.const(c)
            rest = []
            for v, e in m:
                if v in bound:
                    key = (v, e)
                    if key not in cache:
                        cache[key] = bound[v] ** e
                    term = term * cache[key]
                else:
                    rest.append((v, e))
            if rest:
                term = term * MPoly._raw({tuple(rest): Fraction(1)})
            result = result + term
        return result

    def coefficients_in(self, var: str) -> Dict[int, "MPoly"]:
        """Split as ``sum_k coeff_k * var^k``."""
        out: Dict[int, Dict[Monomial, Fraction]] = {}
        for m, c in self._terms.items():
            d = dict(m)
            k = d.pop(var, 0)
            mono = tuple(sorted(d.items(), key=lambda ve: var_key(ve[0])))
            out.setdefault(k, {})[mono] = c
        return {k: MPoly._raw(v) for k, v in out.items()}

    def shift(self, var: str, k: int) -> "MPoly":
        """Multiply by ``var**k``; ``k`` may be negative if divisibility allows."""
        if k == 0:
            return self
        out = {}
        for m, c in self._terms.items():
            d = dict(m)
            e = d.get(var, 0) + k
            if e < 0:
                raise ValueError(f"{self} not divisible by {var}^{-k}")
            if e:
                d[var] = e
            else:
                d.pop(var, None)
            out[tuple(sorted(d.items(), key=lambda ve: var_key(ve[0])))] = c
        return MPoly._raw(out)

    def truncate(self, var: str, order: int) -> "MPoly":
        """Drop every term whose ``var`` exponent is >= order."""
        return MPoly._raw({m: c for m, c in self._terms.items() if dict(m).get(var, 0) < order})

    def content_denominator(self) -> int:
        from math import lcm

        d = 1
        for c in self._terms.values():
            d = lcm(d, c.denominator)
        return d

    # -- ordering and printing -----------------------------------------
    def sorted_terms(self, variables: Iterable[str] | None = None) -> Iterator[Tuple[Monomial, Fraction]]:
        """Terms in graded lexicographic order (highest first)."""
        names = tuple(sorted(set(variables or ()) | set(self.variables), key=var_key))
        index = {v: i for i, v in enumerate(names)}

        def key(item):
            vec = [0] * len(names)
            for v, e in item[0]:
                vec[index[v]] = e
            return (-sum(vec), [-x for x in vec])

        return iter(sorted(self._terms.items(), key=key))

    def sort_key(self):
        return tuple(
            (tuple((var_key(v), e) for v, e in m), c) for m, c in self.sorted_terms()
        )

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)
            mag = abs(c)
            if not mono:
                body = format_scalar(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{format_scalar(mag)}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"MPoly({str(self)!r})"


def const(c) -> MPoly:
    return MPoly.const(c)


def var(name: str) -> MPoly:
    return MPoly.var(name)


def univariate_coeffs(p: MPoly, name: str) -> list:
    """Dense coefficient list (low degree first) of a univariate polynomial."""
    extra = [v for v in p.variables if v != name]
    if extra:
        raise ValueError(f"{p} is not univariate in {name}")
    coeffs = [Fraction(0)] * (p.degree(name) + 1 if p else 0)
    for k, c in p.coefficients_in(name).items():
        coeffs[k] = c.constant_term()
    return coeffs


def from_univariate(coeffs, name: str) -> MPoly:
    return MPoly({((name, k),) if k else (): c for k, c in enumerate(coeffs) if c})
