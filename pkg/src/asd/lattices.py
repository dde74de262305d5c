"""Deligne and Malgrange lattices of elementary models, and their
stability under ``x_n^rho d_i`` (i < n) and ``x_n^(rho+1) d_n``.

A lattice basis vector is ``x_n^s * v (x) e`` where ``v`` runs over a
basis of generalized eigenvectors of the residue and ``e`` is the
canonical trivialization of ``E^phi``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Tuple

from .algebra import AlgebraicTag, ExpandableFraction, Matrix, MPoly, char_poly, eigen_factors, kernel_basis
from .algebra.linalg import columns_to_matrix, inverse
from .algebra.mpoly import univariate_coeffs
from .connection import ElementaryModel, RegularPart, Summand, coords, katz_generic_rank, normalize
from .errors import IrrationalEigenvalue, StabilityFailure


@dataclass(frozen=True)
class TauSection:
    """Representatives of C/Z in the strip ``[lo, lo + 1)``."""

    lo: Fraction = Fraction(0)

    def __call__(self, c: Fraction) -> Fraction:
        return c + self.shift_to_strip(c)

    def shift_to_strip(self, c: Fraction) -> int:
        """The integer ``s`` with ``c + s`` in the strip."""
        return -math.floor(Fraction(c) - self.lo)


@dataclass(frozen=True)
class EigenBlock:
    value: Fraction
    dim: int
    shift: int


@dataclass(frozen=True)
class DeligneLattice:
    residue: Matrix
    change_of_basis: Matrix        # columns: generalized eigenvectors
    blocks: Tuple[EigenBlock, ...]

    @property
    def rank(self) -> int:
        return self.residue.shape[0]

    @property
    def shifts(self) -> Tuple[int, ...]:
        out = []
        for b in self.blocks:
            out.extend([b.shift] * b.dim)
        return tuple(out)

    def adapted_residue(self) -> Matrix:
        """Residue in the eigenvector basis (block diagonal)."""
        p = self.change_of_basis
        return inverse(p) @ self.residue @ p

    def shifted_residue(self) -> Matrix:
        """Matrix of ``x_n d_n`` on the lattice basis ``x_n^s v``."""
        return self.adapted_residue() + Matrix.diag([Fraction(s) for s in self.shifts])

    def shifted_eigenvalues(self) -> Tuple[Fraction, ...]:
        return tuple(b.value + b.shift for b in self.blocks)


def _eigen_blocks(residue: Matrix):
    r = residue.shape[0]
    poly = char_poly(residue)
    blocks = []
    for value, _factor, mult in eigen_factors(univariate_coeffs(poly, "s")):
        if isinstance(value, AlgebraicTag):
            raise IrrationalEigenvalue(f"residue eigenvalue {value} is irrational", tag=value)
        shifted = (residue - Matrix.identity(r).scale(value)) ** r
        vecs = kernel_basis(shifted)
        blocks.append((value, vecs))
    blocks.sort(key=lambda b: b[0])
    return blocks


def deligne_lattice(reg: RegularPart, tau: TauSection = TauSection(), p: int = 1) -> DeligneLattice:
    """Shift each generalized eigenspace so the residue eigenvalue lands in
    the tau-strip.  With ``p > 1`` the strip is taken after the ramified
    pullback ``x_n = t^p`` and the shift is the least integer power of
    ``x_n`` that stays inside that lattice."""
    cols, blocks = [], []
    for value, vecs in _eigen_blocks(reg.residue):
        if p == 1:
            s = tau.shift_to_strip(value)
        else:
            s = math.ceil(tau.lo / p - value)
        blocks.append(EigenBlock(value, len(vecs), s))
        cols.extend(vecs)
    return DeligneLattice(reg.residue, columns_to_matrix(cols), tuple(blocks))


def ramified_pullback(m: ElementaryModel, p: int) -> ElementaryModel:
    """Substitute ``x_n = x_n^p``; residues scale by ``p``."""
    if p < 1:
        raise ValueError("ramification index must be positive")
    if p == 1:
        return m
    xn = m.divisor
    out = []
    for s in m.summands:
        phi = s.phi.substitute({xn: MPoly.var(xn, p)})
        out.append(Summand(phi, RegularPart(s.reg.residue.scale(Fraction(p)))))
    return ElementaryModel(m.n, tuple(out))


@dataclass(frozen=True)
class Lattice:
    model: ElementaryModel
    tau: TauSection
    p: int
    deligne: Tuple[DeligneLattice, ...]

    @property
    def n(self) -> int:
        return self.model.n

    @property
    def rank(self) -> int:
        return sum(d.rank for d in self.deligne)

    def labels(self) -> List[str]:
        out = []
        for i, d in enumerate(self.deligne, 1):
            for k, s in enumerate(d.shifts, 1):
                power = "" if s == 0 else (f"{self.model.divisor}*" if s == 1 else f"{self.model.divisor}^{s}*")
                out.append(f"{power}e{i}.{k}")
        return out

    def action(self, i: int, exponent: int) -> Matrix:
        """Matrix ``F`` of ``x_n^(exponent + [i = n]) d_{x_i}`` (1-based i):
        ``op(b_q) = sum_u F[q, u] b_u`` with ExpandableFraction entries."""
        n = self.n
        xs = coords(n)
        xn = xs[-1]
        power = exponent + (1 if i == n else 0)
        xpow = ExpandableFraction(xn, MPoly.const(1), MPoly.const(1), -power).normalized()
        blocks = []
        for s, d in zip(self.model.summands, self.deligne):
            r = d.rank
            scal = s.phi.diff(xs[i - 1]) * xpow
            rows = []
            if i == n:
                mat = d.shifted_residue()
                lower = xpow * ExpandableFraction(xn, MPoly.const(1), MPoly.const(1), 1)
                for q in range(r):
                    rows.append(tuple(
                        (scal if q == u else ExpandableFraction(xn, MPoly())) + lower * mat[u, q]
                        for u in range(r)))
            else:
                for q in range(r):
                    rows.append(tuple(scal if q == u else ExpandableFraction(xn, MPoly()) for u in range(r)))
            blocks.append(rows)
        total = self.rank
        zero = ExpandableFraction(xn, MPoly())
        out = [[zero] * total for _ in range(total)]
        off = 0
        for rows in blocks:
            for q, row in enumerate(rows):
                for u, val in enumerate(row):
                    out[off + q][off + u] = val.normalized()
            off += len(rows)
        return Matrix(tuple(tuple(r) for r in out))

    def d_generating_k0(self) -> int:
        """Least ``k0`` with ``A - k0`` disjoint from N for every regular
        summand, ``A`` the eigenvalues of ``x_n d_n`` on the lattice modulo
        ``x_n`` times it.  Irregular summands need nothing."""
        k0 = 0
        for s, d in zip(self.model.summands, self.deligne):
            if s.phi.normalized().pole_order:
                continue
            for mu in d.shifted_eigenvalues():
                if mu.denominator == 1:
                    k0 = max(k0, int(mu) + 1)
        return k0


def malgrange_lattice(m: ElementaryModel, tau: TauSection = TauSection(), p: int = 1) -> Lattice:
    m = normalize(m)
    return Lattice(m, tau, p, tuple(deligne_lattice(s.reg, tau, p) for s in m.summands))


@dataclass
class StabilityReport:
    rho: int
    stable: bool
    receipts: List[dict] = field(default_factory=list)
    k0: int = 0

    def to_json(self):
        return {"rho": self.rho, "stable": self.stable, "k0": self.k0, "receipts": self.receipts}


def check_stability(lat: Lattice, rho: int, raise_on_failure: bool = True) -> StabilityReport:
    """Apply ``x_n^rho d_i`` (i < n) and ``x_n^(rho+1) d_n`` to every basis
    vector; the lattice is stable iff every coefficient is regular along
    ``x_n = 0``."""
    labels = lat.labels()
    report = StabilityReport(rho, True, k0=lat.d_generating_k0())
    xn = lat.model.divisor
    for i in range(1, lat.n + 1):
        op = f"{xn}^{rho + (1 if i == lat.n else 0)}*d_x{i}"
        F = lat.action(i, rho)
        for q, label in enumerate(labels):
            image = {labels[u]: str(F[q, u]) for u in range(len(labels)) if not F[q, u].is_zero()}
            report.receipts.append({"operator": op, "basis": label, "image": image})
            for u in range(len(labels)):
                c = F[q, u]
                if c.pole_order > 0:
                    report.stable = False
                    witness = {"operator": op, "basis": label, "component": labels[u],
                               "coefficient": str(c), "pole_order": c.pole_order}
                    if raise_on_failure:
                        raise StabilityFailure(
                            f"{op} maps {label} outside the lattice: coefficient {c} on {labels[u]}",
                            witness=witness)
                    report.receipts[-1]["witness"] = witness
    return report


def stability_rank(m: ElementaryModel) -> int:
    rho = katz_generic_rank(m).rho
    return int(rho)
