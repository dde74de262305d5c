"""The dilatation chart, the exponential twist along it, and the fiberwise
linear forms of an elementary model.

Chart coordinates (``k < n``)::

    x_k = t_k + y_k * t_n^a        x_n = t_n * u,   u = 1 + y_n * t_n^a
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .algebra import ExpandableFraction, MPoly, TruncatedSeries, expand_fraction
from .algebra.mpoly import format_scalar
from .connection import ElementaryModel, coords, katz_generic_rank, normalize
from .errors import BadParameters, NonIntegerRank, PoleTooHigh, RankTooSmall, ZeroRank


def default_truncation(pole_order: int, a: int) -> int:
    return pole_order * (a + 2) + 4


@dataclass(frozen=True)
class DilatationChart:
    n: int
    a: int

    @property
    def x_vars(self) -> Tuple[str, ...]:
        return coords(self.n)

    @property
    def t_vars(self) -> Tuple[str, ...]:
        return tuple(f"t{i}" for i in range(1, self.n + 1))

    @property
    def y_vars(self) -> Tuple[str, ...]:
        return tuple(f"y{i}" for i in range(1, self.n + 1))

    @property
    def tn(self) -> str:
        return self.t_vars[-1]

    @property
    def u(self) -> MPoly:
        return 1 + MPoly.var(self.y_vars[-1]) * MPoly.var(self.tn, self.a)

    def p1_bindings(self, point: Optional[Sequence[Fraction]] = None) -> Dict[str, MPoly]:
        """``x -> p_1(t, y)``; with ``point`` the ``t_k`` (k < n) are set to it."""
        out = {}
        ta = MPoly.var(self.tn, self.a)
        for k in range(self.n - 1):
            base = MPoly.const(point[k]) if point is not None else MPoly.var(self.t_vars[k])
            out[self.x_vars[k]] = base + MPoly.var(self.y_vars[k]) * ta
        out[self.x_vars[-1]] = MPoly.var(self.tn) * self.u
        return out

    def p2_bindings(self, point: Optional[Sequence[Fraction]] = None) -> Dict[str, MPoly]:
        out = {}
        for k in range(self.n - 1):
            out[self.x_vars[k]] = MPoly.const(point[k]) if point is not None else MPoly.var(self.t_vars[k])
        out[self.x_vars[-1]] = MPoly.var(self.tn)
        return out


def build_chart(n: int, a: int) -> DilatationChart:
    if not isinstance(n, int) or not isinstance(a, int) or n < 1 or a < 1:
        raise BadParameters(f"need n >= 1 and a >= 1, got n={n}, a={a}")
    return DilatationChart(n, a)


def _pull(chart: DilatationChart, f, bindings: Mapping[str, MPoly], pole_factor: MPoly) -> ExpandableFraction:
    if isinstance(f, MPoly):
        f = ExpandableFraction(chart.x_vars[-1], f)
    f = f.normalized()
    num = f.num.substitute(bindings)
    den = f.den.substitute(bindings) * pole_factor ** f.pole_order
    return ExpandableFraction(chart.tn, num, den, f.pole_order)


def pull_p1(chart: DilatationChart, f, order: int, point=None) -> TruncatedSeries:
    """``f o p_1`` expanded in ``t_n`` (``x_n^-k`` becomes ``t_n^-k u^-k``)."""
    return expand_fraction(_pull(chart, f, chart.p1_bindings(point), chart.u), order)


def pull_p2(chart: DilatationChart, f, order: int, point=None) -> TruncatedSeries:
    return expand_fraction(_pull(chart, f, chart.p2_bindings(point), MPoly.const(1)), order)


def twist_series(chart: DilatationChart, phi, order: int, point=None, phi2=None) -> TruncatedSeries:
    """``phi o p_1 - phi2 o p_2`` (``phi2`` defaults to ``phi``)."""
    phi2 = phi if phi2 is None else phi2
    return pull_p1(chart, phi, order, point) - pull_p2(chart, phi2, order, point)


# -- results ---------------------------------------------------------------

@dataclass(frozen=True)
class LinearForm:
    coefficients: Tuple[Fraction, ...]
    multiplicity: int = 1

    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def poly(self, names: Optional[Sequence[str]] = None) -> MPoly:
        names = names or [f"y{i}" for i in range(1, len(self.coefficients) + 1)]
        acc = MPoly()
        for c, v in zip(self.coefficients, names):
            acc = acc + MPoly.var(v) * c
        return acc

    def key(self):
        return tuple(self.coefficients)

    def to_json(self):
        return {"form": str(self.poly()), "coefficients": [format_scalar(c) for c in self.coefficients],
                "multiplicity": self.multiplicity}

    def __str__(self):
        return str(self.poly())


@dataclass(frozen=True)
class TurningPoint:
    pair: Tuple[int, int]
    polar_difference: str
    reason: str


@dataclass(frozen=True)
class NonLinearWitness:
    pair: Optional[Tuple[int, int]]
    monomial: str
    limit: str


def _limit_to_form(limit: MPoly, y_vars: Sequence[str], pair=None) -> Union[LinearForm, NonLinearWitness]:
    coeffs = [Fraction(0)] * len(y_vars)
    index = {v: i for i, v in enumerate(y_vars)}
    for mono, c in limit.sorted_terms():
        deg = sum(e for _, e in mono)
        if deg == 0:
            # E^{const} is trivial; constants carry no fiber information
            continue
        if deg > 1 or mono[0][0] not in index:
            return NonLinearWitness(pair, str(MPoly.monomial(dict(mono))), str(limit))
        coeffs[index[mono[0][0]]] = c
    return LinearForm(tuple(coeffs))


def fiber_limit(chart: DilatationChart, phi1, phi2, point, order: int) -> Tuple[TruncatedSeries, MPoly]:
    s = twist_series(chart, phi1, order, point, phi2)
    neg = {k: c for k, c in s.coeffs.items() if k < 0}
    if neg:
        k = min(neg)
        raise PoleTooHigh(f"twist keeps a pole t_n^{k} with coefficient {neg[k]}")
    return s, s.coeff(0)


def fiber_linear_form(chart: DilatationChart, phi, point, order: Optional[int] = None,
                      phi2=None) -> Union[LinearForm, NonLinearWitness]:
    """Constant ``t_n``-coefficient of the twist at ``point``, read as a linear form in y."""
    point = _check_point(chart, point)
    for f in (phi, phi2 if phi2 is not None else phi):
        if f.normalized().pole_order > chart.a:
            raise PoleTooHigh(f"pole order {f.normalized().pole_order} exceeds a = {chart.a}")
    r = max(phi.normalized().pole_order, (phi2 or phi).normalized().pole_order)
    order = max(1, order if order is not None else default_truncation(r, chart.a))
    _, limit = fiber_limit(chart, phi, phi2, point, order)
    return _limit_to_form(limit, chart.y_vars)


def _check_point(chart: DilatationChart, point) -> Tuple[Fraction, ...]:
    point = tuple(Fraction(c) for c in (point or ()))
    if len(point) != chart.n - 1:
        raise BadParameters(f"a point on the divisor needs {chart.n - 1} coordinates, got {len(point)}")
    return point


@dataclass
class PairResult:
    pair: Tuple[int, int]
    multiplicity: int
    status: str  # "linear" | "killed" | "turning-point" | "non-linear"
    form: Optional[LinearForm] = None
    witness: Optional[str] = None


@dataclass
class SpectrumReport:
    a: int
    point: Tuple[Fraction, ...]
    rho: Fraction
    truncation: int
    pairs: List[PairResult] = field(default_factory=list)

    @property
    def surviving(self) -> List[LinearForm]:
        """Aggregated multiset of surviving forms, sorted."""
        acc: Dict[tuple, int] = {}
        for p in self.pairs:
            if p.status == "linear":
                acc[p.form.key()] = acc.get(p.form.key(), 0) + p.multiplicity
        return [LinearForm(k, m) for k, m in sorted(acc.items())]

    @property
    def diagonal(self) -> List[LinearForm]:
        acc: Dict[tuple, int] = {}
        for p in self.pairs:
            if p.status == "linear" and p.pair[0] == p.pair[1]:
                acc[p.form.key()] = acc.get(p.form.key(), 0) + p.multiplicity
        return [LinearForm(k, m) for k, m in sorted(acc.items())]

    @property
    def killed(self) -> List[PairResult]:
        return [p for p in self.pairs if p.status == "killed"]

    @property
    def flags(self) -> List[PairResult]:
        return [p for p in self.pairs if p.status == "turning-point"]

    @property
    def nonlinear(self) -> List[PairResult]:
        return [p for p in self.pairs if p.status == "non-linear"]

    def total_multiplicity(self) -> int:
        return sum(p.multiplicity for p in self.pairs)


def _check_rank(m: ElementaryModel, a: int) -> Fraction:
    rho = katz_generic_rank(m).rho
    if rho.denominator != 1:
        raise NonIntegerRank(f"Katz rank {rho} is not an integer")
    if rho == 0:
        raise ZeroRank("Katz rank is 0: the model is regular along the divisor")
    if a < rho:
        raise RankTooSmall(f"a = {a} is smaller than the Katz rank {rho}")
    return rho


def as_spectrum(m: ElementaryModel, a: int, point, truncation: Optional[int] = None) -> SpectrumReport:
    chart = build_chart(m.n, a)
    point = _check_point(chart, point)
    rho = _check_rank(m, a)
    m = normalize(m)
    order = truncation if truncation is not None else default_truncation(int(rho), a)
    order = max(order, 1)
    values = {x: c for x, c in zip(chart.x_vars, point)}
    report = SpectrumReport(a, point, rho, order)
    for i, si in enumerate(m.summands):
        for j, sj in enumerate(m.summands):
            mult = si.rank * sj.rank
            pair = (i + 1, j + 1)
            diff = (si.phi - sj.phi).normalized()
            if diff.pole_order >= 1:
                lead = diff.leading_polar_coefficient().evaluate(values)
                if lead.is_zero():
                    report.pairs.append(PairResult(pair, mult, "turning-point", witness=str(diff.polar_part())))
                else:
                    report.pairs.append(PairResult(pair, mult, "killed", witness=str(diff.polar_part())))
                continue
            _, limit = fiber_limit(chart, si.phi, sj.phi, point, order)
            res = _limit_to_form(limit, chart.y_vars, pair)
            if isinstance(res, NonLinearWitness):
                report.pairs.append(PairResult(pair, mult, "non-linear", witness=res.monomial))
            else:
                report.pairs.append(PairResult(pair, mult, "linear", form=LinearForm(res.coefficients, mult)))
    return report
