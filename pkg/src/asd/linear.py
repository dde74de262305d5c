"""Linear modules ``E^{lambda_1} (+) ... (+) E^{lambda_r}`` on affine
l-space (each ``lambda`` a linear form in y), constant commuting
systems, their de Rham cohomology and the restriction of an
L-presentation to the fiber over the origin.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .algebra import AlgebraicTag, Matrix, char_poly, eigen_factors, kernel_basis, rank, solve
from .algebra.linalg import columns_to_matrix, poly_at_matrix, sparse_rank
from .algebra.mpoly import format_scalar, univariate_coeffs
from .errors import CommutationFailure, NotCommuting, PropertyLViolated, Unsupported

Value = Union[Fraction, AlgebraicTag]


def _value_key(v: Value):
    if isinstance(v, AlgebraicTag):
        return (1, v.minpoly)
    return (0, Fraction(v))


def value_str(v: Value) -> str:
    return str(v) if isinstance(v, AlgebraicTag) else format_scalar(Fraction(v))


@dataclass(frozen=True)
class JointBlock:
    values: Tuple[Value, ...]
    dimension: int

    @property
    def degree(self) -> int:
        return max((v.degree for v in self.values if isinstance(v, AlgebraicTag)), default=1)

    @property
    def multiplicity(self) -> int:
        """Copies of each ``E^lambda``; for a block of conjugate tags,
        copies per conjugate."""
        return self.dimension // self.degree

    @property
    def rational(self) -> bool:
        return self.degree == 1

    def form_string(self, names: Optional[Sequence[str]] = None) -> str:
        names = names or [f"y{i}" for i in range(1, len(self.values) + 1)]
        if not self.rational:
            return " + ".join(f"{value_str(v)}*{y}" for v, y in zip(self.values, names))
        from .algebra import MPoly

        acc = MPoly()
        for v, y in zip(self.values, names):
            acc = acc + MPoly.var(y) * v
        return str(acc)

    def to_json(self):
        return {"form": self.form_string(), "values": [value_str(v) for v in self.values],
                "dimension": self.dimension, "multiplicity": self.multiplicity,
                "conjugacy_block": not self.rational}


@dataclass(frozen=True)
class LinearModule:
    l: int
    blocks: Tuple[JointBlock, ...]

    def __post_init__(self):
        merged: Dict[tuple, int] = {}
        vals: Dict[tuple, Tuple[Value, ...]] = {}
        for b in self.blocks:
            if len(b.values) != self.l:
                raise ValueError(f"form {b.values} has the wrong length for l = {self.l}")
            key = tuple(_value_key(v) for v in b.values)
            merged[key] = merged.get(key, 0) + b.dimension
            vals[key] = tuple(b.values)
        blocks = tuple(JointBlock(vals[k], merged[k]) for k in sorted(merged))
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_forms(cls, l: int, forms: Sequence[Tuple[Sequence, int]]) -> "LinearModule":
        return cls(l, tuple(JointBlock(tuple(Fraction(v) for v in f), m) for f, m in forms))

    @property
    def rank(self) -> int:
        return sum(b.dimension for b in self.blocks)

    def multiset(self) -> Dict[Tuple[Value, ...], int]:
        return {b.values: b.multiplicity for b in self.blocks}

    def to_json(self):
        return {"l": self.l, "rank": self.rank, "forms": [b.to_json() for b in self.blocks]}


@dataclass(frozen=True)
class ConstantSystem:
    matrices: Tuple[Matrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "matrices", tuple(self.matrices))
        if not self.matrices:
            raise ValueError("need at least one matrix")
        shapes = {m.shape for m in self.matrices}
        if len(shapes) != 1 or not self.matrices[0].is_square:
            raise ValueError("matrices must be square of one common size")

    @property
    def size(self) -> int:
        return self.matrices[0].shape[0]

    @property
    def l(self) -> int:
        return len(self.matrices)


def check_commuting(s: ConstantSystem) -> Tuple[bool, Optional[Tuple[int, int]]]:
    for i, j in combinations(range(s.l), 2):
        a, b = s.matrices[i], s.matrices[j]
        if not (a @ b - b @ a).is_zero():
            return False, (i + 1, j + 1)
    return True, None


def _restrict(m: Matrix, basis: List[tuple]) -> Matrix:
    """Matrix of ``m`` on the invariant subspace spanned by ``basis``."""
    w = columns_to_matrix(basis)
    cols = []
    for v in basis:
        x = solve(w, m.apply(v))
        if x is None:
            raise NotCommuting("subspace is not invariant; the matrices do not commute")
        cols.append(x)
    return columns_to_matrix(cols)


def joint_spectrum_decompose(s: ConstantSystem) -> LinearModule:
    """Joint generalized eigenspaces, split one matrix at a time."""
    ok, pair = check_commuting(s)
    if not ok:
        raise NotCommuting(f"B{pair[0]} and B{pair[1]} do not commute")
    n = s.size
    start = [tuple(Fraction(int(i == j)) for i in range(n)) for j in range(n)]
    pieces: List[Tuple[Tuple[Value, ...], List[tuple]]] = [((), start)]
    for B in s.matrices:
        nxt = []
        for values, basis in pieces:
            c = _restrict(B, basis)
            d = len(basis)
            for value, factor, _ in eigen_factors(univariate_coeffs(char_poly(c), "s")):
                proj = poly_at_matrix(factor, c) ** d
                ker = kernel_basis(proj)
                w = columns_to_matrix(basis)
                sub = [w.apply(k) for k in ker]
                nxt.append((values + (value,), sub))
        pieces = nxt
    return LinearModule(s.l, tuple(JointBlock(v, len(b)) for v, b in pieces))


def derham_linear(m: LinearModule) -> List[int]:
    """``b_0..b_l``: each ``E^0`` summand gives the cohomology of affine
    space, any nonzero form gives nothing."""
    b = [0] * (m.l + 1)
    for blk in m.blocks:
        if all(not isinstance(v, AlgebraicTag) and v == 0 for v in blk.values):
            b[0] += blk.dimension
    return b


def hom_forms(m1: LinearModule, m2: LinearModule) -> List[Tuple[Tuple, int, bool]]:
    """Forms of ``Hom(m1, m2)``: ``mu - lambda`` with multiplicity, and
    whether the difference is known to be nonzero."""
    out = []
    for a in m1.blocks:
        for b in m2.blocks:
            diff, nonzero = [], False
            for x, y in zip(a.values, b.values):
                if isinstance(x, AlgebraicTag) or isinstance(y, AlgebraicTag):
                    diff.append(None)
                    nonzero = nonzero or (x != y and not (isinstance(x, AlgebraicTag) and isinstance(y, AlgebraicTag)))
                else:
                    diff.append(Fraction(y) - Fraction(x))
                    nonzero = nonzero or diff[-1] != 0
            out.append((tuple(diff), a.dimension * b.dimension, nonzero))
    return out


def ext1_linear(m1: LinearModule, m2: LinearModule) -> int:
    """``dim Ext^1(m1, m2)``, the first de Rham Betti number of the Hom module.

    Every rank-one summand of the Hom module is ``E^{mu - lambda}``, whose
    de Rham complex has cohomology only in degree 0.
    """
    if m1.l != m2.l:
        raise ValueError("modules live on spaces of different dimension")
    total = 0
    for diff, mult, _ in hom_forms(m1, m2):
        if all(d is not None for d in diff):
            total += derham_linear(LinearModule.from_forms(m1.l, [(diff, mult)]))[1]
    return total


# -- brute-force Koszul oracle -------------------------------------------------

def _monomials(l: int, bound: int) -> List[Tuple[int, ...]]:
    out = []

    def rec(prefix, left, k):
        if k == l:
            out.append(tuple(prefix))
            return
        for e in range(left + 1):
            rec(prefix + [e], left - e, k + 1)

    rec([], bound, 0)
    out.sort(key=lambda a: (sum(a), a))
    return out


@dataclass
class KoszulResult:
    betti: List[int]
    previous: List[int]
    degree_bound: int
    stabilized: bool

    def to_json(self):
        return {"betti": self.betti, "betti_at_bound_minus_one": self.previous,
                "degree_bound": self.degree_bound, "stabilized": self.stabilized}


def _koszul_single(form: Sequence[Fraction], bound: int) -> List[int]:
    """Betti numbers of ``K(d_1 + l_1, ..., d_l + l_l)`` on ``C[y]``,
    read off degree-truncated pieces: cocycles of degree < bound modulo
    coboundaries of cochains of degree <= bound."""
    l = len(form)
    monos = _monomials(l, bound)
    mindex = {a: k for k, a in enumerate(monos)}
    subsets = [list(combinations(range(l), p)) for p in range(l + 1)]
    sindex = [{s: k for k, s in enumerate(ss)} for ss in subsets]

    def image(p, subset, alpha):
        """d(y^alpha dy_subset) as {(subset', alpha'): coeff} in degree p+1."""
        out = {}
        for i in range(l):
            if i in subset:
                continue
            new = tuple(sorted(subset + (i,)))
            sign = -1 if sum(1 for s in subset if s < i) % 2 else 1
            if alpha[i]:
                beta = alpha[:i] + (alpha[i] - 1,) + alpha[i + 1:]
                key = (new, beta)
                out[key] = out.get(key, 0) + sign * alpha[i]
            if form[i]:
                key = (new, alpha)
                out[key] = out.get(key, 0) + sign * form[i]
        return out

    def col(p, subset, alpha):
        return sindex[p][subset] * len(monos) + mindex[alpha]

    def rank_of(p, src_bound, project_degree=None):
        if p < 0 or p >= l:
            return 0
        rows = []
        for subset in subsets[p]:
            for alpha in monos:
                if sum(alpha) > src_bound:
                    continue
                img = image(p, subset, alpha)
                row = {}
                for (s2, beta), c in img.items():
                    if c and (project_degree is None or sum(beta) == project_degree):
                        row[col(p + 1, s2, beta)] = Fraction(c)
                rows.append(row)
        return sparse_rank(rows)

    betti = []
    for p in range(l + 1):
        dim_low = len(subsets[p]) * sum(1 for a in monos if sum(a) <= bound - 1)
        cocycles = dim_low - rank_of(p, bound - 1)
        boundaries = rank_of(p - 1, bound) - rank_of(p - 1, bound, project_degree=bound)
        betti.append(cocycles - boundaries)
    return betti


def koszul_bruteforce(forms: Sequence[Tuple[Sequence, int]], degree_bound: int) -> KoszulResult:
    """Exact-linear-algebra Betti numbers of the twisted Koszul complex of
    ``(+) E^{lambda}^m`` restricted to polynomial degree ``<= degree_bound``."""
    if degree_bound < 1:
        raise ValueError("degree_bound must be at least 1")
    if not forms:
        raise ValueError("need at least one form")
    l = len(forms[0][0])

    def total(bound):
        acc = [0] * (l + 1)
        for f, mult in forms:
            if any(isinstance(v, AlgebraicTag) for v in f):
                raise Unsupported("brute-force Koszul needs rational forms")
            b = _koszul_single(tuple(Fraction(v) for v in f), bound)
            acc = [x + mult * y for x, y in zip(acc, b)]
        return acc

    now = total(degree_bound)
    prev = total(degree_bound - 1) if degree_bound > 1 else now
    return KoszulResult(now, prev, degree_bound, now == prev)


# -- fiber restriction of an L-presentation ------------------------------------

@dataclass
class RestrictionResult:
    system: ConstantSystem
    module: LinearModule
    subfamily: Tuple[int, ...]
    values_at_origin: Dict[Tuple[int, int, int], Fraction] = field(default_factory=dict)

    def to_json(self):
        return {"subfamily": [i + 1 for i in self.subfamily],
                "B": [m.to_strings() for m in self.system.matrices],
                "module": self.module.to_json()}


def extract_restriction(p) -> RestrictionResult:
    """Evaluate the relation coefficients at t = 0, keep a maximal
    constant-independent subfamily (leftmost pivots) and decompose the
    resulting constant system."""
    from .properties import check_property_L

    verdict = check_property_L(p)
    if not verdict.holds:
        w = verdict.witness
        raise PropertyLViolated(f"coefficient {w.coefficient} violates property L at nu={w.nu}: {w.monomial}")
    m, l = len(p.generators), len(p.y_vars)
    origin = {t: 0 for t in p.t_vars}
    values: Dict[Tuple[int, int, int], Fraction] = {}
    for key, f in p.relations.items():
        num = f.num.evaluate(origin)
        den = f.den.evaluate(origin)
        values[key] = num.as_constant() / den.as_constant()

    deps = [list(d) for d in p.dependencies]
    chosen: List[int] = []
    for j in range(m):
        e = [Fraction(int(k == j)) for k in range(m)]
        cur = deps + [[Fraction(int(k == c)) for k in range(m)] for c in chosen]
        before = rank(Matrix(tuple(tuple(r) for r in cur))) if cur else 0
        if rank(Matrix(tuple(tuple(r) for r in cur + [e]))) > before:
            chosen.append(j)
    k = len(chosen)
    # e_u = sum_c coords[u][c] e'_c modulo dependencies
    span_cols = [tuple(Fraction(int(r == c)) for r in range(m)) for c in chosen] + [tuple(d) for d in deps]
    basis = columns_to_matrix(span_cols)
    coords_ = []
    for u in range(m):
        x = solve(basis, [Fraction(int(r == u)) for r in range(m)])
        if x is None:
            raise AssertionError("generator outside the span of the chosen subfamily")
        coords_.append(x[:k])
    mats = []
    for i in range(1, l + 1):
        rows = []
        for j in chosen:
            row = [Fraction(0)] * k
            for u in range(m):
                a = values.get((i, j + 1, u + 1), Fraction(0))
                if a:
                    for c in range(k):
                        row[c] += a * coords_[u][c]
            rows.append(tuple(row))
        mats.append(Matrix(tuple(rows)))
    system = ConstantSystem(tuple(mats))
    ok, pair = check_commuting(system)
    if not ok:
        raise CommutationFailure(f"restricted matrices B{pair[0]}, B{pair[1]} do not commute")
    return RestrictionResult(system, joint_spectrum_decompose(system), tuple(chosen), values)
