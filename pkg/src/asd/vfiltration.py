"""One-variable V-filtrations.

Convention: ``V_a(M) = {m : ord(m) >= -a - 1}`` where ``ord(m)`` is the
root set of the Bernstein polynomial of ``m``.  With it, ``1`` in
``C[t, 1/t]`` lies in ``V_{-1}`` but not in ``V_{<-1}``, ``t d_t`` acts on
``Gr_a`` with the single eigenvalue ``-a - 1``, and the restriction to
``t = 0`` is computed by ``Gr_0 --t--> Gr_{-1}``.

A module is a direct sum of components, each with a basis
``e_1..e_r``:

* ``regular``: ``C[t, 1/t]^r`` with ``t d_t e = R e`` (rational eigenvalues,
  basis vectors lying in generalized eigenspaces of ``R``);
* ``exponential``: ``E^{c/t^r} (x)`` a regular part, ``t d_t e = (R - r c t^-r) e``;
* ``structure``: ``C[t]`` itself (not localized).

A section is a dict ``{(power, basis index): Fraction}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import AlgebraicTag, Matrix, char_poly, eigen_factors, rank, solve
from .algebra.mpoly import format_scalar, from_univariate, univariate_coeffs
from .errors import (BadParameters, NoBoundFound, NotLocalized, NotStable, Unsupported,
                     WindowExhausted)

Section = Dict[Tuple[int, int], Fraction]
DEFAULT_WINDOW = 12


@dataclass(frozen=True)
class Component:
    kind: str                      # "regular" | "exponential" | "structure"
    residue: Matrix
    c: Fraction = Fraction(0)
    r: int = 0
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("regular", "exponential", "structure"):
            raise BadParameters(f"unknown component kind {self.kind!r}")
        if not self.residue.is_square:
            raise BadParameters("residue must be square")
        if self.kind == "exponential" and (self.r < 1 or self.c == 0):
            raise BadParameters("exponential components need r >= 1 and c != 0")
        if self.kind == "structure" and (self.residue.shape != (1, 1) or self.residue[0, 0] != 0):
            raise BadParameters("the structure sheaf component has residue [[0]]")

    @property
    def rank(self) -> int:
        return self.residue.shape[0]

    @classmethod
    def monomial(cls, alpha=0) -> "Component":
        """``t^alpha C[t, 1/t]``."""
        return cls("regular", Matrix.of([[Fraction(alpha)]]), label=f"t^{format_scalar(Fraction(alpha))}")

    @classmethod
    def exponential(cls, c, r: int = 1, alpha=0) -> "Component":
        return cls("exponential", Matrix.of([[Fraction(alpha)]]), Fraction(c), r)

    @classmethod
    def structure(cls) -> "Component":
        return cls("structure", Matrix.of([[0]]))


@dataclass(frozen=True)
class OneVarModule:
    components: Tuple[Component, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise BadParameters("empty module")
        owner, eig = [], []
        for ci, comp in enumerate(self.components):
            vals = _basis_eigenvalues(comp.residue)
            for j in range(comp.rank):
                owner.append((ci, j))
                eig.append(vals[j])
        object.__setattr__(self, "_owner", tuple(owner))
        object.__setattr__(self, "_eig", tuple(eig))
        offs, o = [], 0
        for comp in self.components:
            offs.append(o)
            o += comp.rank
        object.__setattr__(self, "_offsets", tuple(offs))

    @classmethod
    def of(cls, *components: Component) -> "OneVarModule":
        return cls(tuple(components))

    @property
    def rank(self) -> int:
        return len(self._owner)

    @property
    def localized(self) -> bool:
        return all(c.kind != "structure" for c in self.components)

    def eigenvalue(self, g: int) -> Fraction:
        return self._eig[g]

    def component_of(self, g: int) -> Component:
        return self.components[self._owner[g][0]]

    def localize(self) -> "OneVarModule":
        return OneVarModule(tuple(Component.monomial(0) if c.kind == "structure" else c for c in self.components))

    # -- operators on sections -------------------------------------------
    def check_section(self, m: Section) -> Section:
        out = {}
        for (p, g), c in m.items():
            if not 0 <= g < self.rank:
                raise BadParameters(f"basis index {g} out of range")
            if c:
                if self.component_of(g).kind == "structure" and p < 0:
                    raise BadParameters(f"t^{p} is not a section of C[t]")
                out[(p, g)] = Fraction(c)
        return out

    def tdt(self, m: Section) -> Section:
        out: Section = {}

        def add(key, v):
            nv = out.get(key, 0) + v
            if nv:
                out[key] = nv
            else:
                out.pop(key, None)

        for (p, g), c in m.items():
            ci, j = self._owner[g]
            comp = self.components[ci]
            off = self._offsets[ci]
            if p:
                add((p, g), p * c)
            for i in range(comp.rank):
                rij = comp.residue[i, j]
                if rij:
                    add((p, off + i), rij * c)
            if comp.kind == "exponential":
                add((p - comp.r, g), -comp.r * comp.c * c)
        return out

    def mul_t(self, m: Section, k: int = 1) -> Section:
        return {(p + k, g): c for (p, g), c in m.items()}

    def dt(self, m: Section) -> Section:
        return self.mul_t(self.tdt(m), -1)

    def section_str(self, m: Section) -> str:
        if not m:
            return "0"
        parts = []
        for (p, g), c in sorted(m.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            mono = f"e{g + 1}" if p == 0 else f"t^{p}*e{g + 1}"
            parts.append(f"{format_scalar(c)}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _basis_eigenvalues(r: Matrix) -> List[Fraction]:
    """Eigenvalue attached to each basis vector; every basis vector must
    lie in a generalized eigenspace."""
    n = r.shape[0]
    facs = eigen_factors(univariate_coeffs(char_poly(r), "s"))
    out: List[Optional[Fraction]] = [None] * n
    for value, _, _ in facs:
        if isinstance(value, AlgebraicTag):
            raise Unsupported(f"irrational residue eigenvalue {value}")
        nil = (r - Matrix.identity(n).scale(value)) ** n
        for j in range(n):
            if all(nil[i, j] == 0 for i in range(n)):
                out[j] = value
    if any(v is None for v in out):
        raise Unsupported("residue basis vectors must lie in generalized eigenspaces")
    return out  # type: ignore[return-value]


def section(*terms) -> Section:
    """``section((power, index, coeff), ...)`` with 1-based indices."""
    out: Section = {}
    for p, g, c in terms:
        out[(p, g - 1)] = out.get((p, g - 1), 0) + Fraction(c)
    return {k: v for k, v in out.items() if v}


def _sub(a: Section, b: Section, cb=Fraction(1)) -> Section:
    out = dict(a)
    for k, v in b.items():
        nv = out.get(k, 0) - cb * v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


# -- Bernstein polynomials -----------------------------------------------------

@dataclass(frozen=True)
class BernsteinData:
    section: str
    b: Tuple[Fraction, ...]          # monic, lowest degree first
    witness: Tuple[Tuple[int, int, Fraction], ...]   # (j, i, c): c t^j (t d_t)^i
    ord_set: Tuple[Tuple[Fraction, int], ...]
    window: int

    @property
    def degree(self) -> int:
        return len(self.b) - 1

    def b_string(self, var: str = "s") -> str:
        return str(from_univariate(list(self.b), var))

    def to_json(self):
        return {"section": self.section, "b": self.b_string(),
                "ord": [{"root": format_scalar(r), "multiplicity": k} for r, k in self.ord_set],
                "witness": [{"t_power": j, "tdt_power": i, "coefficient": format_scalar(c)}
                            for j, i, c in self.witness],
                "window": self.window}


def _apply_poly_tdt(m: OneVarModule, coeffs: Sequence[Fraction], s: Section) -> Section:
    acc: Section = {}
    cur = dict(s)
    for c in coeffs:
        if c:
            acc = _sub(acc, cur, -c)
        cur = m.tdt(cur)
    return acc


def verify_bernstein(m: OneVarModule, s: Section, data: BernsteinData) -> bool:
    """``b(t d_t) s - sum c t^j (t d_t)^i s == 0`` literally."""
    lhs = _apply_poly_tdt(m, data.b, s)
    for j, i, c in data.witness:
        term = dict(s)
        for _ in range(i):
            term = m.tdt(term)
        lhs = _sub(lhs, m.mul_t(term, j), c)
    return not lhs


def bernstein(m: OneVarModule, s: Section, window: int = DEFAULT_WINDOW) -> BernsteinData:
    """Least-degree monic ``b`` with ``b(t d_t) s`` in ``V_{-1}(D) s``,
    searched with witnesses ``sum c_{j,i} t^j (t d_t)^i s`` for
    ``1 <= j <= window`` and ``i <= deg b + 1``."""
    s = m.check_section(s)
    if not s:
        raise BadParameters("the zero section has no Bernstein polynomial")
    powers = [dict(s)]
    for d in range(window + 1):
        while len(powers) < d + 3:
            powers.append(m.tdt(powers[-1]))
        cols: List[Section] = [powers[k] for k in range(d)]
        labels = []
        for j in range(1, window + 1):
            for i in range(d + 2):
                cols.append({k: -v for k, v in m.mul_t(powers[i], j).items()})
                labels.append((j, i))
        target = {k: -v for k, v in powers[d].items()}
        keys = sorted(set(target).union(*[set(c) for c in cols]))
        if not cols:
            if not target:
                return _bernstein_result(m, s, (Fraction(1),), (), window)
            continue
        mat = Matrix(tuple(tuple(c.get(k, Fraction(0)) for c in cols) for k in keys))
        x = solve(mat, [target.get(k, Fraction(0)) for k in keys])
        if x is None:
            continue
        b = tuple(x[:d]) + (Fraction(1),)
        wit = tuple((j, i, c) for (j, i), c in zip(labels, x[d:]) if c)
        data = _bernstein_result(m, s, b, wit, window)
        assert verify_bernstein(m, s, data)
        return data
    raise WindowExhausted(f"no Bernstein polynomial of degree <= {window} with t-window {window}")


def _bernstein_result(m, s, b, wit, window) -> BernsteinData:
    roots = []
    if len(b) > 1:
        for value, _, mult in eigen_factors(list(b)):
            if isinstance(value, AlgebraicTag):
                raise Unsupported(f"irrational Bernstein root {value}")
            roots.append((value, mult))
    return BernsteinData(m.section_str(s), tuple(b), tuple(wit), tuple(sorted(roots)), window)


# -- canonical V-filtration ---------------------------------------------------

@dataclass(frozen=True)
class CanonicalV:
    module: OneVarModule
    a: Fraction

    def exponents(self, strict: bool = False) -> Tuple[Optional[int], ...]:
        """Least power of t per basis vector in ``V_a`` (``V_{<a}`` if
        strict); None means the whole module."""
        out = []
        for g in range(self.module.rank):
            comp = self.module.component_of(g)
            if comp.kind == "exponential":
                out.append(None)
                continue
            bound = -self.a - 1 - self.module.eigenvalue(g)
            k = math.floor(bound) + 1 if strict else math.ceil(bound)
            if comp.kind == "structure":
                k = max(k, 0)
            out.append(k)
        return tuple(out)

    def contains(self, s: Section, strict: bool = False) -> bool:
        exps = self.exponents(strict)
        return all(exps[g] is None or p >= exps[g] for (p, g), c in s.items() if c)


def canonical_V(m: OneVarModule, a) -> CanonicalV:
    return CanonicalV(m, Fraction(a))


def ord_of(m: OneVarModule, s: Section) -> Tuple[Fraction, ...]:
    """Closed-form ord set: ``p + lambda`` over the t-leading terms of each
    generalized eigencomponent; empty on exponential components."""
    lead: Dict[int, int] = {}
    for (p, g), c in s.items():
        if c and m.component_of(g).kind != "exponential":
            lead[g] = min(p, lead.get(g, p))
    return tuple(sorted({p + m.eigenvalue(g) for g, p in lead.items()}))


# -- graded pieces ------------------------------------------------------------

@dataclass(frozen=True)
class GradedPiece:
    a: Fraction
    basis: Tuple[Tuple[int, int], ...]          # (power, basis index)
    tdt_action: Optional[Matrix]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def labels(self) -> List[str]:
        return [f"e{g + 1}" if p == 0 else f"t^{p}*e{g + 1}" for p, g in self.basis]

    def to_json(self):
        return {"a": format_scalar(self.a), "dimension": self.dimension, "basis": self.labels(),
                "tdt_action": self.tdt_action.to_strings() if self.tdt_action is not None else []}


def graded_piece(m: OneVarModule, a) -> GradedPiece:
    """``Gr_a = V_a / V_{<a}``: classes ``t^p e_g`` with ``p + lambda_g = -a - 1``."""
    a = Fraction(a)
    basis = []
    for g in range(m.rank):
        comp = m.component_of(g)
        if comp.kind == "exponential":
            continue
        p = -a - 1 - m.eigenvalue(g)
        if p.denominator != 1:
            continue
        p = int(p)
        if comp.kind == "structure" and p < 0:
            continue
        basis.append((p, g))
    if not basis:
        return GradedPiece(a, (), None)
    index = {b: k for k, b in enumerate(basis)}
    rows = [[Fraction(0)] * len(basis) for _ in basis]
    for k, (p, g) in enumerate(basis):
        img = m.tdt({(p, g): Fraction(1)})
        for key, c in img.items():
            if key in index:
                rows[index[key]][k] += c
    return GradedPiece(a, tuple(basis), Matrix(tuple(tuple(r) for r in rows)))


def gr_psi(m: OneVarModule) -> List[GradedPiece]:
    """Nonzero ``Gr_a`` for ``-1 <= a < 0``."""
    indices = set()
    for g in range(m.rank):
        if m.component_of(g).kind == "exponential":
            continue
        lam = m.eigenvalue(g)
        k = -math.ceil(lam)                 # lam + k in (-1, 0]
        indices.add(-(lam + k) - 1)
    pieces = [graded_piece(m, a) for a in sorted(indices)]
    return [p for p in pieces if p.dimension]


def _similar(a: Matrix, b: Matrix) -> bool:
    if a.shape != b.shape:
        return False
    pa, pb = char_poly(a), char_poly(b)
    if pa != pb:
        return False
    n = a.shape[0]
    for value, _, _ in eigen_factors(univariate_coeffs(pa, "s")):
        if isinstance(value, AlgebraicTag):
            continue
        ia = a - Matrix.identity(n).scale(value)
        ib = b - Matrix.identity(n).scale(value)
        for k in range(1, n + 1):
            if rank(ia ** k) != rank(ib ** k):
                return False
    return True


@dataclass
class InvarianceReport:
    holds: bool
    pieces: List[dict] = field(default_factory=list)

    def to_json(self):
        return {"holds": self.holds, "pieces": self.pieces}


def localization_invariance(m: OneVarModule) -> InvarianceReport:
    """Compare ``Psi`` of ``m`` and of its localization; the comparison map
    is the one induced by ``m -> m[1/t]``, which sends each basis class to
    the class of the same section."""
    loc = m.localize()
    a, b = gr_psi(m), gr_psi(loc)
    rep = InvarianceReport(len(a) == len(b))
    for pa, pb in zip(a, b):
        same = pa.a == pb.a and pa.basis == pb.basis and _similar(pa.tdt_action, pb.tdt_action)
        rep.holds = rep.holds and same
        rep.pieces.append({"a": format_scalar(pa.a), "dimension": pa.dimension,
                           "map": Matrix.identity(pa.dimension).to_strings(), "isomorphic": same})
    return rep


# -- lattice -> good V-filtration ---------------------------------------------

@dataclass(frozen=True)
class GoodVFiltration:
    """``U_k = t^-k U_0`` for a split lattice ``U_0 = (+) t^{m_g} C[t] e_g``."""

    module: OneVarModule
    exponents: Tuple[Optional[int], ...]
    origin: str = "lattice"
    k0: Optional[int] = None
    eigenvalues: Tuple = ()
    checks: Tuple[dict, ...] = ()

    def step(self, k: int) -> Tuple[Optional[int], ...]:
        return tuple(None if e is None else e - k for e in self.exponents)

    def contains(self, k: int, s: Section) -> bool:
        ex = self.step(k)
        return all(ex[g] is None or p >= ex[g] for (p, g), c in s.items() if c)

    def to_json(self):
        return {"origin": self.origin, "exponents": list(self.exponents), "k0": self.k0,
                "eigenvalues": [format_scalar(v) if not isinstance(v, AlgebraicTag) else str(v)
                                for v in self.eigenvalues],
                "checks": list(self.checks)}


def _lattice_stable(m: OneVarModule, exps: Sequence[int]) -> Optional[str]:
    for g in range(m.rank):
        img = m.tdt({(exps[g], g): Fraction(1)})
        for (p, h), c in img.items():
            if p < exps[h]:
                return f"t d_t (t^{exps[g]} e{g + 1}) has the term {format_scalar(c)}*t^{p}*e{h + 1} outside U_0"
    return None


def gr0_action(m: OneVarModule, exps: Sequence[int]) -> Matrix:
    """``t d_t`` on ``U_0 / t U_0`` in the basis ``t^{m_g} e_g``."""
    r = m.rank
    rows = [[Fraction(0)] * r for _ in range(r)]
    for g in range(r):
        for (p, h), c in m.tdt({(exps[g], g): Fraction(1)}).items():
            if p == exps[h]:
                rows[h][g] += c
    return Matrix(tuple(tuple(x) for x in rows))


def _relation_holds(m: OneVarModule, exps: Sequence[int], k0: int, k: int) -> bool:
    """``U_{k+k0} = sum_{i<=k} d_t^i U_{k0}``, checked modulo ``U_{k0}``."""
    base = [e - k0 for e in exps]
    target = [b - k for b in base]
    rng = [(p, g) for g in range(m.rank) for p in range(target[g], base[g])]
    if not rng:
        return True
    index = {key: n for n, key in enumerate(rng)}
    vecs = []
    for g in range(m.rank):
        for i in range(1, k + 1):
            for q in range(base[g], base[g] + i):
                s: Section = {(q, g): Fraction(1)}
                for _ in range(i):
                    s = m.dt(s)
                v = [Fraction(0)] * len(rng)
                for (p, h), c in s.items():
                    if p < base[h]:
                        v[index[(p, h)]] += c
                vecs.append(tuple(v))
    if not vecs:
        return False
    return rank(Matrix(tuple(vecs))) == len(rng)


def lattice_to_goodV(exponents: Sequence[int], m: OneVarModule, check_bound: int = 5) -> GoodVFiltration:
    """Good V-filtration ``U_k = t^-k U_0`` with the least ``k0`` such that
    ``A - k0`` misses N, ``A`` the eigenvalues of ``t d_t`` on ``U_0/U_-1``."""
    if not m.localized:
        raise NotLocalized("the module is not localized along t = 0")
    exps = tuple(int(e) for e in exponents)
    if len(exps) != m.rank:
        raise BadParameters(f"need {m.rank} lattice exponents")
    bad = _lattice_stable(m, exps)
    if bad:
        raise NotStable(bad)
    act = gr0_action(m, exps)
    facs = eigen_factors(univariate_coeffs(char_poly(act), "s"))
    A = tuple(v for v, _, _ in facs)
    k0 = 0
    for v in A:
        if not isinstance(v, AlgebraicTag) and v.denominator == 1:
            k0 = max(k0, int(v) + 1)
    checks = []
    for k in range(check_bound + 1):
        ok = _relation_holds(m, exps, k0, k)
        checks.append({"k": k, "k0": k0, "holds": ok})
        if not ok:
            raise AssertionError(f"relation fails at k={k} for k0={k0}")
    if k0 > 0:
        fails = [k for k in range(1, check_bound + 1) if not _relation_holds(m, exps, k0 - 1, k)]
        checks.append({"k0_minus_one": k0 - 1, "fails_at": fails})
    return GoodVFiltration(m, exps, "lattice", k0, A, tuple(checks))


def generated_filtration(m: OneVarModule, s: Section) -> GoodVFiltration:
    """``U_k = V_k(D) s`` for a section ``t^p e_g`` on an eigenvector of a
    rank-one regular module."""
    s = m.check_section(s)
    if m.rank != 1 or len(s) != 1 or m.components[0].kind == "exponential":
        raise Unsupported("generated filtrations are supported for t^p e on rank-one regular modules")
    (p, _), = s
    return GoodVFiltration(m, (p,), "generated")


def canonical_filtration(m: OneVarModule, shift=0) -> GoodVFiltration:
    """``U_k = V_{k + shift}``."""
    return GoodVFiltration(m, canonical_V(m, shift).exponents(), "canonical")


@dataclass
class Comparison:
    k1: int
    k2: int
    tight: Tuple[int, int]
    certificates: List[dict] = field(default_factory=list)

    def to_json(self):
        return {"k1": self.k1, "k2": self.k2, "tight": list(self.tight), "certificates": self.certificates}


def compare_filtrations(U: GoodVFiltration, W: GoodVFiltration, window: int = DEFAULT_WINDOW,
                        checked: range = range(-3, 4)) -> Comparison:
    """Least ``K`` with ``U_{k-K} c W_k c U_{k+K}`` for all k (the shifts
    are uniform in k for these filtrations).  The tight one-sided shifts
    are reported alongside."""
    if U.module != W.module:
        raise BadParameters("filtrations over different modules")
    diffs = []
    for g, (eu, ew) in enumerate(zip(U.exponents, W.exponents)):
        if eu is None and ew is None:
            continue
        if eu is None or ew is None:
            raise NoBoundFound(f"basis vector e{g + 1}: one filtration is a lattice, the other the whole module")
        diffs.append(eu - ew)
    if not diffs:
        return Comparison(0, 0, (0, 0))
    t1, t2 = min(diffs), max(diffs)
    K = max(-t1, t2, 0)
    if K > window:
        raise NoBoundFound(f"shift {K} exceeds the search window {window}")
    out = Comparison(-K, K, (t1, t2))
    for k in checked:
        lo, mid, hi = U.step(k - K), W.step(k), U.step(k + K)
        for g in range(len(mid)):
            if mid[g] is None:
                continue
            assert lo[g] >= mid[g] >= hi[g]
            out.certificates.append({
                "k": k, "basis": f"e{g + 1}",
                "U_k+k1_in_W_k": f"t^{lo[g]}*e{g + 1} = t^{lo[g] - mid[g]} * (t^{mid[g]}*e{g + 1})",
                "W_k_in_U_k+k2": f"t^{mid[g]}*e{g + 1} = t^{mid[g] - hi[g]} * (t^{hi[g]}*e{g + 1})"})
    return out


# -- restriction to t = 0 ------------------------------------------------------

@dataclass
class RestrictionComplex:
    gr0: GradedPiece
    gr_minus1: GradedPiece
    t_map: List[List[Fraction]]
    h_minus1: int
    h0: int

    def to_json(self):
        return {"Gr_0": self.gr0.to_json(), "Gr_-1": self.gr_minus1.to_json(),
                "t_map": [[format_scalar(c) for c in r] for r in self.t_map],
                "H^-1": self.h_minus1, "H^0": self.h0}


def restriction_complex(m: OneVarModule) -> RestrictionComplex:
    g0, g1 = graded_piece(m, 0), graded_piece(m, -1)
    index = {b: k for k, b in enumerate(g1.basis)}
    rows = [[Fraction(0)] * g0.dimension for _ in range(g1.dimension)]
    for k, (p, g) in enumerate(g0.basis):
        for (q, h), c in m.mul_t({(p, g): Fraction(1)}).items():
            if (q, h) in index:
                rows[index[(q, h)]][k] += c
    rk = rank(Matrix(tuple(tuple(r) for r in rows))) if rows and g0.dimension else 0
    return RestrictionComplex(g0, g1, rows, g0.dimension - rk, g1.dimension - rk)
