"""Exact matrices.

:class:`Matrix` is ring-generic (entries may be Fractions, MPoly or
ExpandableFraction); the elimination routines below require Fraction
entries.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import List, Sequence, Tuple

from ..errors import NotSquare
from .mpoly import MPoly, from_univariate, scalar


@dataclass(frozen=True)
class Matrix:
    rows: Tuple[tuple, ...]

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.rows)
        if not rows or not rows[0]:
            raise ValueError("matrices must be non-empty")
        if any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged matrix")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def of(cls, rows) -> "Matrix":
        return cls(tuple(tuple(scalar(x) if isinstance(x, (int, str)) else x for x in r) for r in rows))

    @classmethod
    def identity(cls, n: int, one=Fraction(1), zero=Fraction(0)) -> "Matrix":
        return cls(tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, r: int, c: int, zero=Fraction(0)) -> "Matrix":
        return cls(tuple(tuple(zero for _ in range(c)) for _ in range(r)))

    @classmethod
    def diag(cls, values, zero=Fraction(0)) -> "Matrix":
        n = len(values)
        return cls(tuple(tuple(values[i] if i == j else zero for j in range(n)) for i in range(n)))

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    @property
    def is_square(self) -> bool:
        r, c = self.shape
        return r == c

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def T(self) -> "Matrix":
        return Matrix(tuple(zip(*self.rows)))

    def map(self, fn) -> "Matrix":
        return Matrix(tuple(tuple(fn(x) for x in r) for r in self.rows))

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Matrix(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Matrix(tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def __neg__(self):
        return self.map(lambda x: -x)

    def scale(self, c) -> "Matrix":
        return self.map(lambda x: x * c)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        n, m = self.shape
        m2, p = other.shape
        if m != m2:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        cols = [other.col(j) for j in range(p)]
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = r[0] * c[0]
                for a, b in zip(r[1:], c[1:]):
                    acc = acc + a * b
                row.append(acc)
            out.append(tuple(row))
        return Matrix(tuple(out))

    def apply(self, v: Sequence) -> tuple:
        return tuple(sum((a * b for a, b in zip(r, v)), start=0 * v[0]) for r in self.rows)

    def is_zero(self) -> bool:
        return all(not x if not isinstance(x, MPoly) else x.is_zero() for r in self.rows for x in r)

    def __pow__(self, k: int) -> "Matrix":
        n, _ = self.shape
        one = self.rows[0][0] * 0 + 1
        result = Matrix.identity(n, one, one * 0)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def trace(self):
        acc = self.rows[0][0]
        for i in range(1, len(self.rows)):
            acc = acc + self.rows[i][i]
        return acc

    def block(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix(tuple(tuple(self.rows[i][j] for j in cols) for i in rows))

    def to_strings(self) -> List[List[str]]:
        return [[str(x) if not isinstance(x, Fraction) else _fmt(x) for x in r] for r in self.rows]

    def __str__(self):
        return "[" + ", ".join("[" + ", ".join(row) + "]" for row in self.to_strings()) + "]"


def _fmt(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def commutator(a: Matrix, b: Matrix) -> Matrix:
    return a @ b - b @ a


def direct_sum(blocks: Sequence[Matrix]) -> Matrix:
    n = sum(b.shape[0] for b in blocks)
    m = sum(b.shape[1] for b in blocks)
    out = [[Fraction(0)] * m for _ in range(n)]
    i0 = j0 = 0
    for b in blocks:
        r, c = b.shape
        for i in range(r):
            for j in range(c):
                out[i0 + i][j0 + j] = b[i, j]
        i0 += r
        j0 += c
    return Matrix(tuple(tuple(r) for r in out))


def kronecker(a: Matrix, b: Matrix) -> Matrix:
    ra, ca = a.shape
    rb, cb = b.shape
    return Matrix(tuple(
        tuple(a[i // rb, j // cb] * b[i % rb, j % cb] for j in range(ca * cb))
        for i in range(ra * rb)))


# -- elimination over Q ------------------------------------------------

def _integer_rows(m: Matrix) -> List[List[int]]:
    rows = []
    for r in m.rows:
        d = 1
        for x in r:
            d = lcm(d, Fraction(x).denominator)
        rows.append([int(Fraction(x) * d) for x in r])
    return rows


def row_echelon(m: Matrix) -> Tuple[List[List[int]], List[int]]:
    """Fraction-free (Bareiss) row echelon form; returns rows and pivot columns."""
    a = _integer_rows(m)
    nrows, ncols = len(a), len(a[0])
    pivots: List[int] = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        p = next((i for i in range(r, nrows) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        for i in range(r + 1, nrows):
            for j in range(c + 1, ncols):
                q, rem = divmod(a[r][c] * a[i][j] - a[i][c] * a[r][j], prev)
                assert rem == 0, "Bareiss division must be exact"
                a[i][j] = q
            a[i][c] = 0
        prev = a[r][c]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: Matrix) -> int:
    return len(row_echelon(m)[1])


def kernel_basis(m: Matrix) -> List[Tuple[Fraction, ...]]:
    """Basis of the right kernel ``{v : m v = 0}``; empty iff injective."""
    a, pivots = row_echelon(m)
    ncols = m.shape[1]
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r in reversed(range(len(pivots))):
            pc = pivots[r]
            acc = Fraction(0)
            for j in range(pc + 1, ncols):
                if a[r][j]:
                    acc += a[r][j] * v[j]
            v[pc] = -acc / a[r][pc]
        basis.append(tuple(v))
    return basis


def solve(m: Matrix, b: Sequence) -> Tuple[Fraction, ...] | None:
    """One solution of ``m x = b`` or None."""
    n, k = m.shape
    aug = Matrix(tuple(tuple(r) + (scalar(bi) if not isinstance(bi, Fraction) else bi,) for r, bi in zip(m.rows, b)))
    a, pivots = row_echelon(aug)
    if k in pivots:
        return None
    x = [Fraction(0)] * k
    for r in reversed(range(len(pivots))):
        pc = pivots[r]
        acc = Fraction(a[r][k])
        for j in range(pc + 1, k):
            if a[r][j]:
                acc -= a[r][j] * x[j]
        x[pc] = acc / a[r][pc]
    return tuple(x)


def inverse(m: Matrix) -> Matrix:
    n, k = m.shape
    if n != k:
        raise NotSquare(f"{n}x{k} matrix has no inverse")
    cols = []
    for j in range(n):
        e = [Fraction(int(i == j)) for i in range(n)]
        x = solve(m, e)
        if x is None:
            raise ZeroDivisionError("singular matrix")
        cols.append(x)
    return Matrix(tuple(zip(*cols)))


def columns_to_matrix(cols: Sequence[Sequence]) -> Matrix:
    return Matrix(tuple(zip(*cols)))


def char_poly(m: Matrix, name: str = "s") -> MPoly:
    """Characteristic polynomial ``det(s I - m)`` by Faddeev-LeVerrier."""
    n, k = m.shape
    if n != k:
        raise NotSquare(f"{n}x{k} matrix has no characteristic polynomial")
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    mk = Matrix.zeros(n, n)
    ident = Matrix.identity(n)
    for step in range(1, n + 1):
        mk = m @ mk + ident.scale(coeffs[n - step + 1])
        coeffs[n - step] = -(m @ mk).trace() / step
    return from_univariate(coeffs, name)


def poly_at_matrix(coeffs: Sequence[Fraction], m: Matrix) -> Matrix:
    """Horner evaluation of a dense polynomial (low degree first)."""
    n = m.shape[0]
    acc = Matrix.zeros(n, n)
    ident = Matrix.identity(n)
    for c in reversed(coeffs):
        acc = acc @ m + ident.scale(c)
    return acc


def sparse_rank(rows: Sequence[dict]) -> int:
    """Rank of a sparse matrix given as ``{column: value}`` rows, over Q."""
    pivots: dict = {}  # pivot column -> normalized row
    rank_ = 0
    for row in rows:
        r = {c: Fraction(v) for c, v in row.items() if v}
        while r:
            c = min(r)
            piv = pivots.get(c)
            if piv is None:
                lead = r[c]
                pivots[c] = {k: v / lead for k, v in r.items()}
                rank_ += 1
                break
            f = r[c]
            for k, v in piv.items():
                nv = r.get(k, 0) - f * v
                if nv:
                    r[k] = nv
                else:
                    r.pop(k, None)
    return rank_
