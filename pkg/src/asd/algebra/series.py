"""Truncated Laurent series in one distinguished variable, and fractions
that expand into them.

Coefficients are :class:`MPoly` in the remaining variables, so an
expansion is only possible when the denominator restricted to the
distinguished variable ``= 0`` is a nonzero *constant*; otherwise the
coefficients would leave the polynomial ring.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Union

from ..errors import NotExpandable, UnknownVariable
from .mpoly import MPoly, scalar


class TruncatedSeries:
    """``sum_{k < order} coeffs[k] * var**k`` plus an unknown ``O(var**order)``."""

    __slots__ = ("var", "order", "_coeffs")

    def __init__(self, var: str, order: int, coeffs: Mapping[int, MPoly] | None = None):
        self.var = var
        self.order = order
        self._coeffs: Dict[int, MPoly] = {}
        for k, c in (coeffs or {}).items():
            c = MPoly.coerce(c)
            if k < order and c:
                if var in c.variables:
                    raise ValueError(f"coefficient {c} mentions the series variable {var}")
                self._coeffs[k] = c

    @classmethod
    def from_poly(cls, p: MPoly, var: str, order: int) -> "TruncatedSeries":
        return cls(var, order, MPoly.coerce(p).coefficients_in(var))

    @property
    def coeffs(self) -> Dict[int, MPoly]:
        return dict(self._coeffs)

    def coeff(self, k: int) -> MPoly:
        if k >= self.order:
            raise ValueError(f"coefficient {k} beyond truncation order {self.order}")
        return self._coeffs.get(k, MPoly())

    def valuation(self) -> int:
        """Smallest exponent with a known nonzero coefficient, else the order."""
        return min(self._coeffs) if self._coeffs else self.order

    def truncate(self, order: int) -> "TruncatedSeries":
        return TruncatedSeries(self.var, min(order, self.order), self._coeffs)

    def shift(self, k: int) -> "TruncatedSeries":
        """Multiply by ``var**k``."""
        return TruncatedSeries(self.var, self.order + k, {e + k: c for e, c in self._coeffs.items()})

    def to_poly(self) -> MPoly:
        """The retained part as a polynomial; only for non-negative exponents."""
        if self._coeffs and min(self._coeffs) < 0:
            raise ValueError("series has negative exponents")
        out = MPoly()
        for k, c in self._coeffs.items():
            out = out + c * MPoly.var(self.var, k)
        return out

    def _lift(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            if other.var != self.var:
                raise ValueError(f"series in {self.var} and {other.var} do not mix")
            return other
        return TruncatedSeries.from_poly(MPoly.coerce(other), self.var, self.order)

    def __add__(self, other):
        other = self._lift(other)
        order = min(self.order, other.order)
        out = dict(self._coeffs)
        for k, c in other._coeffs.items():
            out[k] = out.get(k, MPoly()) + c
        return TruncatedSeries(self.var, order, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.var, self.order, {k: -c for k, c in self._coeffs.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, (TruncatedSeries, MPoly)):
            c = scalar(other)
            return TruncatedSeries(self.var, self.order, {k: v * c for k, v in self._coeffs.items()})
        if isinstance(other, MPoly) and self.var not in other.variables:
            return TruncatedSeries(self.var, self.order, {k: v * other for k, v in self._coeffs.items()})
        other = self._lift(other)
        # a = O(t^Na) with valuation va, b likewise: ab is known below min(Na+vb, Nb+va)
        order = min(self.order + other.valuation(), other.order + self.valuation())
        out: Dict[int, MPoly] = {}
        for i, a in self._coeffs.items():
            for j, b in other._coeffs.items():
                if i + j < order:
                    out[i + j] = out.get(i + j, MPoly()) + a * b
        return TruncatedSeries(self.var, order, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return TruncatedSeries(self.var, self.order, {0: MPoly.const(1)})
        result = self
        for _ in range(n - 1):
            result = result * self
        return result

    def inverse(self) -> "TruncatedSeries":
        """Multiplicative inverse; the leading coefficient must be a nonzero constant."""
        v = self.valuation()
        if v >= self.order:
            raise NotExpandable("cannot invert a series that is zero to its order")
        lead = self._coeffs[v]
        if not lead.is_constant():
            raise NotExpandable(f"leading coefficient {lead} is not a unit")
        inv_lead = 1 / lead.constant_term()
        n = self.order - v  # relative precision
        unit = {k - v: c * inv_lead for k, c in self._coeffs.items()}
        # (1 + h)^-1 with h = unit - 1, coefficient recursion
        inv = {0: MPoly.const(1)}
        for k in range(1, n):
            acc = MPoly()
            for j in range(1, k + 1):
                hj = unit.get(j)
                if hj is not None and (k - j) in inv:
                    acc = acc + hj * inv[k - j]
            if acc:
                inv[k] = -acc
        return TruncatedSeries(self.var, n - v, {k - v: c * inv_lead for k, c in inv.items()})

    def euler(self) -> "TruncatedSeries":
        """Apply ``var * d/dvar``."""
        return TruncatedSeries(self.var, self.order, {k: c * k for k, c in self._coeffs.items()})

    def diff_other(self, name: str) -> "TruncatedSeries":
        return TruncatedSeries(self.var, self.order, {k: c.diff(name) for k, c in self._coeffs.items()})

    def evaluate(self, values: Mapping[str, object]) -> "TruncatedSeries":
        return TruncatedSeries(self.var, self.order, {k: c.evaluate(values) for k, c in self._coeffs.items()})

    def agrees_with(self, other: "TruncatedSeries", below: int | None = None) -> bool:
        n = min(self.order, other.order) if below is None else below
        lo = min([0] + list(self._coeffs) + list(other._coeffs))
        return all(self._coeffs.get(k, MPoly()) == other._coeffs.get(k, MPoly()) for k in range(lo, n))

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.var == other.var and self.order == other.order and self._coeffs == other._coeffs

    def __hash__(self):
        return hash((self.var, self.order, frozenset(self._coeffs.items())))

    def __str__(self):
        parts = []
        for k in sorted(self._coeffs):
            c = self._coeffs[k]
            mono = "" if k == 0 else (self.var if k == 1 else f"{self.var}^{k}")
            if not mono:
                parts.append(f"({c})")
            else:
                parts.append(f"({c})*{mono}")
        body = " + ".join(parts) if parts else "0"
        return f"{body} + O({self.var}^{self.order})"

    __repr__ = __str__


@dataclass(frozen=True, eq=False)
class ExpandableFraction:
    """``var**(-pole_order) * num / den``.

    After :meth:`normalized`, ``num`` is not divisible by ``var`` when
    ``pole_order > 0`` and ``den`` is not divisible by ``var``.
    """

    var: str
    num: MPoly
    den: MPoly = field(default_factory=lambda: MPoly.const(1))
    pole_order: int = 0

    def __post_init__(self):
        object.__setattr__(self, "num", MPoly.coerce(self.num))
        object.__setattr__(self, "den", MPoly.coerce(self.den))
        if self.den.is_zero():
            raise ZeroDivisionError("zero denominator")

    @classmethod
    def from_quotient(cls, num, den, var: str) -> "ExpandableFraction":
        return cls(var, MPoly.coerce(num), MPoly.coerce(den), 0).normalized()

    @classmethod
    def poly(cls, p, var: str) -> "ExpandableFraction":
        return cls(var, MPoly.coerce(p))

    def normalized(self) -> "ExpandableFraction":
        num, den, k = self.num, self.den, self.pole_order
        if num.is_zero():
            return ExpandableFraction(self.var, MPoly(), MPoly.const(1), 0)
        dv = den.valuation(self.var)
        if dv:
            den = den.shift(self.var, -dv)
            k += dv
        nv = num.valuation(self.var)
        if nv and k > 0:
            s = min(nv, k)
            num = num.shift(self.var, -s)
            k -= s
        if k < 0:
            num = num.shift(self.var, -k)
            k = 0
        if den.is_constant():
            c = den.constant_term()
            num, den = num * (1 / c), MPoly.const(1)
        return ExpandableFraction(self.var, num, den, k)

    def __eq__(self, other):
        if isinstance(other, (ExpandableFraction, MPoly, int, Fraction)):
            return (self - other).num.is_zero()
        return NotImplemented

    def __hash__(self):
        return hash(self.normalized().pole_order)

    def is_polynomial(self) -> bool:
        f = self.normalized()
        return f.pole_order == 0 and f.den.is_constant()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    # arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "ExpandableFraction":
        if isinstance(other, ExpandableFraction):
            if other.var != self.var:
                raise ValueError("fractions over different distinguished variables")
            return other
        return ExpandableFraction(self.var, MPoly.coerce(other))

    def __add__(self, other):
        o = self._coerce(other)
        k = max(self.pole_order, o.pole_order)
        a = self.num.shift(self.var, k - self.pole_order)
        b = o.num.shift(self.var, k - o.pole_order)
        if self.den == o.den:
            return ExpandableFraction(self.var, a + b, self.den, k).normalized()
        return ExpandableFraction(self.var, a * o.den + b * self.den, self.den * o.den, k).normalized()

    __radd__ = __add__

    def __neg__(self):
        return ExpandableFraction(self.var, -self.num, self.den, self.pole_order)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return ExpandableFraction(self.var, self.num * o.num, self.den * o.den,
                                  self.pole_order + o.pole_order).normalized()

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers not supported")
        return ExpandableFraction(self.var, self.num ** n, self.den ** n, self.pole_order * n).normalized()

    def diff(self, name: str) -> "ExpandableFraction":
        n, d, k, t = self.num, self.den, self.pole_order, self.var
        if name == t:
            # d/dt (t^-k n/d) = t^-(k+1) (t(n'd - nd') - k n d) / d^2
            if d.is_constant():
                return ExpandableFraction(t, MPoly.var(t) * n.diff(t) - n * k, d, k + 1).normalized()
            top = MPoly.var(t) * (n.diff(t) * d - n * d.diff(t)) - n * d * k
            return ExpandableFraction(t, top, d * d, k + 1).normalized()
        if d.is_constant():
            return ExpandableFraction(t, n.diff(name), d, k).normalized()
        return ExpandableFraction(t, n.diff(name) * d - n * d.diff(name), d * d, k).normalized()

    def euler(self, name: str | None = None) -> "ExpandableFraction":
        """Apply ``name * d/dname`` (default: the distinguished variable)."""
        name = name or self.var
        return (self.diff(name) * MPoly.var(name)) if name != self.var else \
            (self.diff(name) * ExpandableFraction(self.var, MPoly.var(self.var)))

    def substitute(self, bindings: Mapping[str, MPoly]) -> "ExpandableFraction":
        """Polynomial substitution; the distinguished variable may be rebound."""
        num = self.num.substitute(bindings)
        den = self.den.substitute(bindings)
        t = self.var
        if self.pole_order:
            tv = MPoly.coerce(bindings.get(t, MPoly.var(t)))
            den = den * tv ** self.pole_order
        return ExpandableFraction.from_quotient(num, den, t)

    def evaluate(self, values: Mapping[str, object]) -> "ExpandableFraction":
        if self.var in values:
            raise ValueError("evaluate the distinguished variable via expansion instead")
        return ExpandableFraction(self.var, self.num.evaluate(values), self.den.evaluate(values),
                                  self.pole_order).normalized()

    def polar_part(self) -> "ExpandableFraction":
        """Sum of the terms with negative ``var`` exponent."""
        if self.pole_order == 0:
            return ExpandableFraction(self.var, MPoly())
        s = expand_fraction(self, 0)
        num = MPoly()
        for e, c in s.coeffs.items():
            num = num + c * MPoly.var(self.var, e + self.pole_order)
        return ExpandableFraction(self.var, num, MPoly.const(1), self.pole_order).normalized()

    def leading_polar_coefficient(self) -> MPoly:
        """Coefficient of ``var**(-pole_order)``; zero if regular."""
        f = self.normalized()
        if f.pole_order == 0:
            return MPoly()
        return expand_fraction(f, -f.pole_order + 1).coeff(-f.pole_order)

    def variables(self):
        return tuple(sorted(set(self.num.variables) | set(self.den.variables) | {self.var}))

    def __str__(self):
        f = self
        num = str(f.num)
        if len(f.num) > 1 and (f.pole_order or not f.den.is_constant() or f.den != 1):
            num = f"({num})"
        parts = []
        if not f.den.is_constant() or f.den != 1:
            parts.append(f"({f.den})" if len(f.den) > 1 else str(f.den))
        if f.pole_order:
            parts.append(f.var if f.pole_order == 1 else f"{f.var}^{f.pole_order}")
        if not parts:
            return str(f.num)
        return f"{num}/" + ("*".join(parts) if len(parts) == 1 else "(" + "*".join(parts) + ")")


def expand_fraction(f: ExpandableFraction, order: int) -> TruncatedSeries:
    """Expansion of ``f`` in its distinguished variable, exact below ``order``."""
    t = f.var
    den0 = f.den.evaluate({t: 0})
    if den0.is_zero() or not den0.constant_term():
        raise NotExpandable(f"denominator {f.den} vanishes at {t} = 0")
    f = f.normalized()
    k = f.pole_order
    if order < -k:
        raise ValueError(f"order {order} below the pole order -{k}")
    if not den0.is_constant():
        raise NotExpandable(
            f"denominator {f.den} restricted to {t} = 0 is not a constant; "
            "evaluate the remaining variables first")
    need = order + k
    num = TruncatedSeries.from_poly(f.num, t, need)
    den = TruncatedSeries.from_poly(f.den, t, need)
    return (num * den.inverse()).truncate(need).shift(-k)


Bindable = Union[MPoly, TruncatedSeries]


def substitute(p: MPoly, bindings: Mapping[str, Bindable], strict: bool = True):
    """Compose ``p`` with the given bindings.

    If any binding is a :class:`TruncatedSeries` the result is a series
    whose order is the smallest order among them; otherwise an MPoly.
    Variables absent from ``bindings`` are identity-bound unless
    ``strict`` is set and they are not mentioned at all, in which case
    :class:`UnknownVariable` is raised.
    """
    p = MPoly.coerce(p)
    series = [b for b in bindings.values() if isinstance(b, TruncatedSeries)]
    if strict:
        missing = [v for v in p.variables if v not in bindings]
        if missing:
            raise UnknownVariable(f"unbound variables: {', '.join(missing)}")
    if not series:
        return p.substitute({k: MPoly.coerce(v) for k, v in bindings.items()})
    t = series[0].var
    if any(s.var != t for s in series):
        raise ValueError("series bindings must share one variable")
    order = min(s.order for s in series)
    lifted = {}
    for name, b in bindings.items():
        if isinstance(b, TruncatedSeries):
            lifted[name] = b.truncate(order)
        else:
            lifted[name] = TruncatedSeries.from_poly(MPoly.coerce(b), t, order)
    result = TruncatedSeries(t, order, {})
    powers: Dict[tuple, TruncatedSeries] = {}
    for mono, c in p.items():
        term = TruncatedSeries(t, 10**9, {0: MPoly.const(c)})
        for v, e in mono:
            if v in lifted:
                key = (v, e)
                if key not in powers:
                    acc = TruncatedSeries(t, 10**9, {0: MPoly.const(1)})
                    for _ in range(e):
                        acc = acc * lifted[v]
                    powers[key] = acc
                term = term * powers[key]
            else:
                term = term * MPoly.var(v, e)
        result = result + term
    return result.truncate(order)
