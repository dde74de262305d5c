"""Presentations ``d_{y_i} e_j = sum_u f_iju(t, y) e_u`` and the degree
conditions L and P on their coefficients.

Condition L on a polynomial ``g = sum_nu P_nu(y) t^nu`` asks
``deg_y P_nu <= |nu|`` for every ``nu``.  A coefficient ``f = g/h``
satisfies L when both ``g`` and ``h`` do and ``h`` is a unit at the
origin, which makes L imply P.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .algebra import ExpandableFraction, MPoly, expand_fraction
from .connection import ElementaryModel, coords
from .errors import BadParameters, LatticeNotStable, NotExpandable
from .lattices import Lattice, TauSection, malgrange_lattice

Key = Tuple[int, int, int]  # (i, j, u), 1-based


@dataclass(frozen=True)
class Presentation:
    t_vars: Tuple[str, ...]
    y_vars: Tuple[str, ...]
    generators: Tuple[str, ...]
    relations: Mapping[Key, ExpandableFraction]
    dependencies: Tuple[Tuple[Fraction, ...], ...] = ()
    notes: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "t_vars", tuple(self.t_vars))
        object.__setattr__(self, "y_vars", tuple(self.y_vars))
        object.__setattr__(self, "generators", tuple(self.generators))
        rel = {}
        m, l = len(self.generators), len(self.y_vars)
        for (i, j, u), f in sorted(self.relations.items()):
            if not (1 <= i <= l and 1 <= j <= m and 1 <= u <= m):
                raise ValueError(f"relation index {(i, j, u)} out of range")
            if f.var != self.tn:
                raise ValueError(f"coefficients must be fractions in {self.tn}")
            f = f.normalized()
            if not f.is_zero():
                rel[(i, j, u)] = f
        object.__setattr__(self, "relations", rel)
        deps = tuple(tuple(Fraction(c) for c in d) for d in self.dependencies)
        if any(len(d) != m for d in deps):
            raise ValueError("dependency vectors must have one entry per generator")
        object.__setattr__(self, "dependencies", deps)

    @property
    def tn(self) -> str:
        return self.t_vars[-1]

    def coefficient(self, i: int, j: int, u: int) -> ExpandableFraction:
        return self.relations.get((i, j, u), ExpandableFraction(self.tn, MPoly()))


# -- property L -------------------------------------------------------------

@dataclass(frozen=True)
class LWitness:
    coefficient: Key
    part: str            # "numerator" | "denominator" | "expansion"
    nu: Tuple[int, ...]
    monomial: str

    def to_json(self):
        return {"coefficient": list(self.coefficient), "part": self.part,
                "nu": list(self.nu), "monomial": self.monomial}


@dataclass(frozen=True)
class LVerdict:
    holds: bool
    witness: Optional[LWitness]
    window: int
    checked: int

    def to_json(self):
        return {"holds": self.holds, "witness": self.witness.to_json() if self.witness else None,
                "window": self.window, "coefficients_checked": self.checked}


def _split(mono, t_vars, y_vars):
    nu = tuple(dict(mono).get(t, 0) for t in t_vars)
    ydeg = sum(e for v, e in mono if v in y_vars)
    return nu, ydeg


def _poly_violation(p: MPoly, t_vars, y_vars) -> Optional[Tuple[Tuple[int, ...], str]]:
    for mono, c in p.sorted_terms():
        nu, ydeg = _split(mono, t_vars, y_vars)
        if ydeg > sum(nu):
            return nu, str(MPoly({mono: c}))
    return None


def default_window(f: ExpandableFraction) -> int:
    return f.den.degree() + f.pole_order + 4


def _expansion_violation(f: ExpandableFraction, t_vars, y_vars, window: int):
    """Check the t_n-adic expansion (coefficients in the other t's and y)."""
    try:
        s = expand_fraction(f, window)
    except NotExpandable:
        return None
    tn = t_vars[-1]
    for k in sorted(s.coeffs):
        for mono, c in s.coeffs[k].sorted_terms():
            nu, ydeg = _split(mono, t_vars, y_vars)
            nu = nu[:-1] + (k,)
            if ydeg > sum(nu):
                return ("expansion", nu, str(MPoly({mono: c})) + (f"*{tn}^{k}" if k else ""))
    return None


def _coefficient_violation(f: ExpandableFraction, t_vars, y_vars, window: int):
    """First L-violation of one coefficient as (part, nu, monomial), or None."""
    tn = t_vars[-1]
    f = f.normalized()
    h = f.den * MPoly.var(tn, f.pole_order)
    for part, poly in (("numerator", f.num), ("denominator", h)):
        bad = _poly_violation(poly, t_vars, y_vars)
        if bad:
            return (part,) + bad
    h0 = h.evaluate({t: 0 for t in t_vars})
    if h0.is_zero() or not h0.is_constant():
        # the denominator is not a unit at the origin; the expansion
        # locates a concrete offending term when there is one
        return _expansion_violation(f, t_vars, y_vars, window) or \
            ("denominator", (0,) * len(t_vars), str(h0))
    return _expansion_violation(f, t_vars, y_vars, window)


def check_property_L(p: Presentation, order: Optional[int] = None) -> LVerdict:
    """Exact check on numerators and denominators, then a cross-check of
    the expansions up to ``t_n^order`` (default: per coefficient,
    denominator degree + 4)."""
    if order is not None and order < 1:
        raise BadParameters("window must be at least 1")
    window_used = 0
    for key, f in sorted(p.relations.items()):
        w = order if order is not None else default_window(f)
        window_used = max(window_used, w)
        bad = _coefficient_violation(f, p.t_vars, p.y_vars, w)
        if bad:
            part, nu, mono = bad
            return LVerdict(False, LWitness(key, part, tuple(nu), mono), window_used, len(p.relations))
    return LVerdict(True, None, window_used, len(p.relations))


def check_property_L_fraction(f: ExpandableFraction, t_vars, y_vars, order: Optional[int] = None) -> LVerdict:
    w = order if order is not None else default_window(f)
    bad = _coefficient_violation(f, tuple(t_vars), tuple(y_vars), w)
    if bad:
        part, nu, mono = bad
        return LVerdict(False, LWitness((0, 0, 0), part, tuple(nu), mono), w, 1)
    return LVerdict(True, None, w, 1)


@dataclass(frozen=True)
class PVerdict:
    holds: bool
    witness: Optional[Tuple[Key, str]] = None

    def to_json(self):
        return {"holds": self.holds,
                "witness": None if self.witness is None else
                {"coefficient": list(self.witness[0]), "reason": self.witness[1]}}


def check_property_P(p: Presentation) -> PVerdict:
    """Every coefficient is defined near the whole fiber over the origin:
    no pole in ``t_n`` and a denominator that is a nonzero constant at t = 0."""
    origin = {t: 0 for t in p.t_vars}
    for key, f in sorted(p.relations.items()):
        f = f.normalized()
        if f.pole_order:
            return PVerdict(False, (key, f"pole of order {f.pole_order} along {p.tn} = 0"))
        h0 = f.den.evaluate(origin)
        if h0.is_zero() or not h0.is_constant():
            return PVerdict(False, (key, f"denominator restricts to {h0} on the fiber"))
    return PVerdict(True)


@dataclass
class ClosureVerdict:
    holds: bool
    items: List[Tuple[str, str, LVerdict]] = field(default_factory=list)

    def to_json(self):
        return {"holds": self.holds,
                "items": [{"operation": a, "result": b, "verdict": v.to_json()} for a, b, v in self.items]}


def l_algebra_closure(f: ExpandableFraction, t_vars, y_vars, order: Optional[int] = None,
                      others: Sequence[ExpandableFraction] = ()) -> ClosureVerdict:
    """Recheck L on ``t_n d_n f`` and on sums and products with ``others``
    (and with ``f`` itself)."""
    base = check_property_L_fraction(f, t_vars, y_vars, order)
    if not base.holds:
        raise BadParameters(f"{f} does not satisfy property L")
    out = ClosureVerdict(True)
    tn = t_vars[-1]
    derived = [("t_n*d_t_n", f.euler(tn))]
    for g in (f,) + tuple(others):
        derived.append((f"*({g})", f * g))
        derived.append((f"+({g})", f + g))
    for label, h in derived:
        v = check_property_L_fraction(h, t_vars, y_vars, order)
        out.items.append((label, str(h), v))
        out.holds = out.holds and v.holds
    return out


# -- synthesis of the H_a presentation ----------------------------------------

@dataclass(frozen=True)
class LatticeAction:
    """Action data ``x_n^(a + [i = n]) d_{x_i} m_q = sum_u F_i[q, u] m_u``."""

    n: int
    labels: Tuple[str, ...]
    matrices: Tuple  # n Matrix objects with ExpandableFraction entries in x_n
    groups: Tuple[int, ...]  # summand index per basis element

    @classmethod
    def from_lattice(cls, lat: Lattice, a: int) -> "LatticeAction":
        groups = []
        for i, d in enumerate(lat.deligne):
            groups.extend([i] * d.rank)
        return cls(lat.n, tuple(lat.labels()), tuple(lat.action(i, a) for i in range(1, lat.n + 1)),
                   tuple(groups))


def synthesize_Ha(data: Union[ElementaryModel, LatticeAction], a: int, k0: int = 0, point=None,
                  blocks: str = "diagonal", allow_unstable: bool = False,
                  tau: TauSection = TauSection()) -> Presentation:
    """Presentation of the lattice of ``H_a`` generated by
    ``g_qj = p_1^+ m_q (x) p_2^+ e_j / t_n^k0`` near ``point`` (translated
    to the origin).

    ``d_{y_l} g_qj = sum_u f_lqu(p_1) / u^(a + [l = n]) g_uj``.

    ``blocks="diagonal"`` keeps ``j`` in the summand of ``q`` (the pairs
    whose twist stays regular); ``"all"`` uses every pair.  Without
    ``allow_unstable`` a pole in the action data raises LatticeNotStable.
    """
    if a < 1:
        raise BadParameters("a must be a positive integer")
    if k0 < 0:
        raise BadParameters("k0 must be non-negative")
    if isinstance(data, ElementaryModel):
        data = LatticeAction.from_lattice(malgrange_lattice(data, tau), a)
    n = data.n
    point = tuple(Fraction(c) for c in (point or (0,) * (n - 1)))
    if len(point) != n - 1:
        raise BadParameters(f"point needs {n - 1} coordinates")
    xs = coords(n)
    ts = tuple(f"t{i}" for i in range(1, n + 1))
    ys = tuple(f"y{i}" for i in range(1, n + 1))
    tn = ts[-1]
    ta = MPoly.var(tn, a)
    u = 1 + MPoly.var(ys[-1]) * ta
    bind = {xs[k]: MPoly.const(point[k]) + MPoly.var(ts[k]) + MPoly.var(ys[k]) * ta for k in range(n - 1)}
    bind[xs[-1]] = MPoly.var(tn) * u

    m = len(data.labels)
    for l, F in enumerate(data.matrices, 1):
        for q in range(m):
            for w in range(m):
                c = F[q, w]
                if c.normalized().pole_order and not allow_unstable:
                    raise LatticeNotStable(
                        f"x_n^{a + (l == n)}*d_x{l} maps {data.labels[q]} to a pole: {c} on {data.labels[w]}")

    pairs = [(q, j) for q in range(m) for j in range(m)
             if blocks == "all" or data.groups[q] == data.groups[j]]
    index = {pj: k + 1 for k, pj in enumerate(pairs)}
    gens = tuple(f"g[{data.labels[q]},{data.labels[j]}*]" for q, j in pairs)
    rel: Dict[Key, ExpandableFraction] = {}
    for l, F in enumerate(data.matrices, 1):
        power = a + (1 if l == n else 0)
        for q in range(m):
            for w in range(m):
                c = F[q, w].normalized()
                if c.is_zero():
                    continue
                num = c.num.substitute(bind)
                den = c.den.substitute(bind) * u ** (power + c.pole_order)
                coeff = ExpandableFraction(tn, num, den, c.pole_order).normalized()
                for (qq, j) in pairs:
                    if qq == q and (w, j) in index:
                        rel[(l, index[(q, j)], index[(w, j)])] = coeff
    note = (f"a={a}", f"k0={k0}", "point=" + ",".join(str(c) for c in point), f"blocks={blocks}")
    return Presentation(ts, ys, gens, rel, notes=note)


def graded_generators(p: Presentation, k0: int, d: int) -> Presentation:
    """Generators ``(t_n d_n)^alpha t_n^k e_i`` for ``|k| <= k0``, ``alpha < d``.

    Leibniz for the derivation ``t_n d_n`` gives the coefficient on
    ``(beta, k, u)`` as ``C(alpha, beta) (t_n d_n)^(alpha - beta) f_liu``.
    """
    if k0 < 0 or d < 1:
        raise BadParameters("need k0 >= 0 and d >= 1")
    if k0 == 0 and d == 1:
        return p
    tn = p.tn
    m = len(p.generators)
    labels, index = [], {}
    for alpha in range(d):
        for k in range(-k0, k0 + 1):
            for i in range(m):
                index[(alpha, k, i)] = len(labels) + 1
                pre = "" if alpha == 0 else (f"(t_n d_n)^{alpha} " if alpha > 1 else "(t_n d_n) ")
                tk = "" if k == 0 else (f"{tn} " if k == 1 else f"{tn}^{k} ")
                labels.append(f"{pre}{tk}{p.generators[i]}".strip())
    derivs: Dict[Tuple[Key, int], ExpandableFraction] = {}

    def euler_pow(key, f, times):
        if (key, times) not in derivs:
            derivs[(key, times)] = f if times == 0 else euler_pow(key, f, times - 1).euler(tn)
        return derivs[(key, times)]

    rel: Dict[Key, ExpandableFraction] = {}
    for (l, i, u), f in sorted(p.relations.items()):
        for alpha in range(d):
            for beta in range(alpha + 1):
                coeff = euler_pow((l, i, u), f, alpha - beta) * comb(alpha, beta)
                if coeff.is_zero():
                    continue
                for k in range(-k0, k0 + 1):
                    key = (l, index[(alpha, k, i - 1)], index[(beta, k, u - 1)])
                    prev = rel.get(key)
                    rel[key] = coeff if prev is None else prev + coeff
    deps = []
    for dep in p.dependencies:
        for alpha in range(d):
            for k in range(-k0, k0 + 1):
                v = [Fraction(0)] * len(labels)
                for i, c in enumerate(dep):
                    v[index[(alpha, k, i)] - 1] = c
                deps.append(tuple(v))
    return Presentation(p.t_vars, p.y_vars, tuple(labels), rel, tuple(deps),
                        p.notes + (f"graded k0={k0} d={d}",))
