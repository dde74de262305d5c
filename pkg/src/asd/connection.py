"""Meromorphic connections on affine n-space with poles along x_n = 0.

Two representations are used:

* :class:`ElementaryModel` -- a finite sum of ``E^phi (x) R`` with
  ``phi`` a fraction in ``x_n`` and ``R`` a logarithmic regular part
  ``d + residue * dx_n / x_n``.
* :class:`MatrixConnection` -- ``n`` matrices ``A_i`` with entries
  Laurent in ``x_n``; a section ``v`` is differentiated as
  ``d_i v + A_i v``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Tuple

from .algebra import ExpandableFraction, Matrix, MPoly
from .algebra.linalg import direct_sum, kronecker
from .errors import CyclicVectorFailure


def coords(n: int) -> Tuple[str, ...]:
    return tuple(f"x{i}" for i in range(1, n + 1))


@dataclass(frozen=True)
class RegularPart:
    residue: Matrix

    def __post_init__(self):
        if not self.residue.is_square:
            raise ValueError("residue must be square")

    @classmethod
    def trivial(cls, rank: int = 1) -> "RegularPart":
        return cls(Matrix.zeros(rank, rank))

    @property
    def rank(self) -> int:
        return self.residue.shape[0]

    def dual(self) -> "RegularPart":
        return RegularPart(-self.residue.T())

    def tensor(self, other: "RegularPart") -> "RegularPart":
        a, b = self.residue, other.residue
        return RegularPart(kronecker(a, Matrix.identity(b.shape[0])) + kronecker(Matrix.identity(a.shape[0]), b))

    def __str__(self):
        return str(self.residue)


@dataclass(frozen=True)
class Summand:
    phi: ExpandableFraction
    reg: RegularPart = field(default_factory=RegularPart.trivial)

    @property
    def rank(self) -> int:
        return self.reg.rank

    @property
    def pole_order(self) -> int:
        return self.phi.normalized().pole_order


@dataclass(frozen=True)
class ElementaryModel:
    n: int
    summands: Tuple[Summand, ...]

    def __post_init__(self):
        object.__setattr__(self, "summands", tuple(self.summands))
        if self.n < 1:
            raise ValueError("dimension must be positive")
        for s in self.summands:
            if s.phi.var != self.divisor:
                raise ValueError(f"phi must be a fraction in {self.divisor}")
            extra = set(s.phi.variables()) - set(coords(self.n))
            if extra:
                raise ValueError(f"phi mentions foreign variables {sorted(extra)}")

    @property
    def divisor(self) -> str:
        return f"x{self.n}"

    @property
    def rank(self) -> int:
        return sum(s.rank for s in self.summands)

    @classmethod
    def exponential(cls, n: int, phi, rank: int = 1) -> "ElementaryModel":
        """``E^phi`` (optionally tensored with a trivial rank-``rank`` part)."""
        from .algebra import parse_fraction

        if not isinstance(phi, ExpandableFraction):
            phi = parse_fraction(phi, f"x{n}")
        return cls(n, (Summand(phi, RegularPart.trivial(rank)),))

    def __add__(self, other: "ElementaryModel") -> "ElementaryModel":
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        return ElementaryModel(self.n, self.summands + other.summands)

    def polar_classes(self) -> List[Tuple[ExpandableFraction, int]]:
        """Polar parts with the total rank carried by each, deterministic order."""
        acc: Dict[str, Tuple[ExpandableFraction, int]] = {}
        for s in self.summands:
            pp = s.phi.polar_part()
            key = str(pp)
            prev = acc.get(key)
            acc[key] = (pp, (prev[1] if prev else 0) + s.rank)
        return [acc[k] for k in sorted(acc, key=_phi_sort_key_str)]


def _phi_sort_key_str(text: str):
    return (text != "0", len(text), text)


def _phi_key(phi: ExpandableFraction):
    f = phi.normalized()
    return (f.pole_order, str(f.polar_part()), str(f))


@dataclass(frozen=True)
class MatrixConnection:
    n: int
    A: Tuple[Matrix, ...]

    def __post_init__(self):
        var = f"x{self.n}"

        def coerce(x):
            if isinstance(x, ExpandableFraction):
                return x
            return ExpandableFraction(var, MPoly.coerce(x))

        object.__setattr__(self, "A", tuple(a.map(coerce) for a in self.A))
        if len(self.A) != self.n:
            raise ValueError(f"need {self.n} matrices, got {len(self.A)}")
        shapes = {m.shape for m in self.A}
        if len(shapes) != 1 or not self.A[0].is_square:
            raise ValueError("connection matrices must be square of equal size")

    @property
    def rank(self) -> int:
        return self.A[0].shape[0]

    @property
    def divisor(self) -> str:
        return f"x{self.n}"

    @classmethod
    def from_potential(cls, n: int, phi: ExpandableFraction) -> "MatrixConnection":
        """The rank-1 connection ``d + d(phi)``."""
        return cls(n, tuple(Matrix(((phi.diff(x),),)) for x in coords(n)))


@dataclass(frozen=True)
class KatzRank:
    rho: Fraction
    method: str = "pole-order"

    @property
    def integral(self) -> bool:
        return self.rho.denominator == 1

    def __str__(self):
        r = self.rho
        return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


# -- operations ----------------------------------------------------------

def _is_zero_entry(x) -> bool:
    if isinstance(x, ExpandableFraction):
        return x.is_zero()
    if isinstance(x, MPoly):
        return x.is_zero()
    return x == 0


def check_integrability(m: MatrixConnection) -> Tuple[bool, Optional[Tuple[int, int]]]:
    """Return ``(True, None)`` or ``(False, (i, j))`` for the first
    pair (1-based) whose curvature does not vanish."""
    xs = coords(m.n)
    for i in range(m.n):
        for j in range(i + 1, m.n):
            ai, aj = m.A[i], m.A[j]
            curv = aj.map(lambda f: f.diff(xs[i])) - ai.map(lambda f: f.diff(xs[j])) + (ai @ aj - aj @ ai)
            if not all(_is_zero_entry(x) for r in curv.rows for x in r):
                return False, (i + 1, j + 1)
    return True, None


def dual(m: ElementaryModel) -> ElementaryModel:
    return ElementaryModel(m.n, tuple(Summand(-s.phi, s.reg.dual()) for s in m.summands))


def hom_model(m2: ElementaryModel, m1: ElementaryModel) -> ElementaryModel:
    """Elementary model of ``Hom(m2, m1) = m1 (x) m2^*``."""
    if m1.n != m2.n:
        raise ValueError("dimension mismatch")
    out = []
    for si in m1.summands:
        for sj in m2.summands:
            out.append(Summand((si.phi - sj.phi).normalized(), si.reg.tensor(sj.reg.dual())))
    return normalize(ElementaryModel(m1.n, tuple(out)))


def normalize(m: ElementaryModel) -> ElementaryModel:
    """Reduce every phi, merge summands with identical phi (regular parts
    are direct-summed) and sort summands by polar part.

    Summands whose phis differ by a function regular along the divisor
    share a polar class (see :meth:`ElementaryModel.polar_classes`) but
    keep their own regular tail.
    """
    groups: Dict[str, List[Summand]] = {}
    phis: Dict[str, ExpandableFraction] = {}
    for s in m.summands:
        phi = s.phi.normalized()
        key = str(phi)
        groups.setdefault(key, []).append(s)
        phis[key] = phi
    merged = []
    for key, members in groups.items():
        if len(members) == 1:
            reg = members[0].reg
        else:
            reg = RegularPart(direct_sum([s.reg.residue for s in members]))
        merged.append(Summand(phis[key], reg))
    merged.sort(key=lambda s: _phi_key(s.phi))
    return ElementaryModel(m.n, tuple(merged))


def katz_generic_rank(m) -> KatzRank:
    if isinstance(m, ElementaryModel):
        rho = max((s.pole_order for s in m.summands), default=0)
        return KatzRank(Fraction(rho), "pole-order")
    if isinstance(m, MatrixConnection):
        return _katz_matrix(m)
    raise TypeError(f"cannot compute a Katz rank for {type(m).__name__}")


# -- cyclic vector and Newton polygon over Q(x_1..x_{n-1})(x_n) ------------

def _field(n: int):
    from sympy import QQ
    from sympy.polys.fields import field

    K, *gens = field(",".join(coords(n)), QQ)
    return K, gens


def _to_field(f: ExpandableFraction, K, gens):
    names = coords(len(gens))
    index = {v: i for i, v in enumerate(names)}

    def conv(p: MPoly):
        acc = K(0)
        for mono, c in p.items():
            term = K(c.numerator) / K(c.denominator)
            for v, e in mono:
                term = term * gens[index[v]] ** e
            acc = acc + term
        return acc

    return conv(f.num) / (conv(f.den) * gens[-1] ** f.pole_order)


def _valuation(elem, k: int) -> int:
    def val(poly):
        return min(m[k] for m in poly.monoms())

    return val(elem.numer) - val(elem.denom)


def _rank_and_solve(vectors, target):
    """Return (independent?, coefficients c with target = sum c_k vectors[k])."""
    r = len(target)
    cols = len(vectors)
    rows = [[vectors[k][i] for k in range(cols)] + [target[i]] for i in range(r)]
    piv_cols = []
    row = 0
    for c in range(cols):
        p = next((i for i in range(row, r) if rows[i][c] != 0), None)
        if p is None:
            return False, None
        rows[row], rows[p] = rows[p], rows[row]
        inv = 1 / rows[row][c]
        rows[row] = [x * inv for x in rows[row]]
        for i in range(r):
            if i != row and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[row])]
        piv_cols.append(c)
        row += 1
    return True, [rows[k][cols] for k in range(cols)]


def cyclic_candidates(rank: int, n: int, limit: int = 25):
    """Deterministic candidate family: coordinate vectors, then small
    integer combinations, then combinations with powers of x_n."""
    seen = []
    basis = [tuple(int(i == j) for j in range(rank)) for i in range(rank)]
    seen.extend((b, (0,) * rank) for b in basis)
    for coeffs in product((1, 2, -1), repeat=rank):
        if len(seen) >= limit:
            break
        if sum(1 for c in coeffs if c) < 2:
            continue
        seen.append((coeffs, (0,) * rank))
    shifts = [tuple(range(rank)), tuple(reversed(range(rank)))]
    for sh in shifts:
        for coeffs in product((1, 2), repeat=rank):
            seen.append((coeffs, sh))
    out = []
    for c in seen:
        if c not in out:
            out.append(c)
    return out[:limit]


def _katz_matrix(m: MatrixConnection) -> KatzRank:
    K, gens = _field(m.n)
    xn = gens[-1]
    r = m.rank
    A = [[_to_field(m.A[-1][i, j], K, gens) for j in range(r)] for i in range(r)]

    def nabla(v):
        return [v[i].diff(xn) + sum((A[i][j] * v[j] for j in range(r)), K(0)) for i in range(r)]

    attempts = cyclic_candidates(r, m.n)
    for coeffs, shifts in attempts:
        v = [K(c) * xn ** s for c, s in zip(coeffs, shifts)]
        chain = [v]
        for _ in range(r):
            chain.append(nabla(chain[-1]))
        ok, c = _rank_and_solve(chain[:r], chain[r])
        if not ok:
            continue
        # operator  d^r - sum_k c_k d^k  annihilates v
        slope = Fraction(0)
        for k, ck in enumerate(c):
            if ck != 0:
                v_k = _valuation(ck, m.n - 1)
                slope = max(slope, Fraction(-v_k, r - k) - 1)
        return KatzRank(slope, "cyclic-vector+newton-polygon")
    raise CyclicVectorFailure(f"no cyclic vector among {len(attempts)} candidates")


def newton_polygon(coeff_valuations: Dict[int, int], order: int) -> List[Tuple[Fraction, Fraction]]:
    """Lower-hull vertices for ``sum_k a_k d^k`` with ``v(a_k)`` given and
    ``a_order`` a unit: points ``(k, v(a_k) - k)`` extended up-left."""
    pts = sorted((k, Fraction(v - k)) for k, v in coeff_valuations.items())
    pts.append((order, Fraction(-order)))
    hull: List[Tuple[Fraction, Fraction]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    return hull
