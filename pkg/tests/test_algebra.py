from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from asd.algebra import (AlgebraicTag, ExpandableFraction, Matrix, MPoly, char_poly, eigen_factors,
                         expand_fraction, inverse, kernel_basis, parse_fraction, parse_poly, parse_scalar,
                         rank, rational_roots, solve)
from asd.algebra.linalg import sparse_rank
from asd.algebra.mpoly import univariate_coeffs
from asd.errors import NotExpandable, ParseError

from conftest import to_sympy

X = sympy.symbols("x1 x2 t")
small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def polys(draw, names=("x1", "x2"), max_terms=4, max_deg=3):
    p = MPoly()
    for _ in range(draw(st.integers(0, max_terms))):
        exps = {v: draw(st.integers(0, max_deg)) for v in names}
        p = p + MPoly.monomial(exps, draw(small))
    return p


@given(polys(), polys())
def test_ring_ops_match_sympy(p, q):
    sp, sq = to_sympy(p), to_sympy(q)
    assert sympy.expand(to_sympy(p * q) - sp * sq) == 0
    assert sympy.expand(to_sympy(p + q) - (sp + sq)) == 0
    assert sympy.expand(to_sympy(p - q) - (sp - sq)) == 0


@given(polys())
def test_diff_and_substitute(p):
    x1, x2 = sympy.symbols("x1 x2")
    assert sympy.expand(to_sympy(p.diff("x1")) - sympy.diff(to_sympy(p), x1)) == 0
    sub = p.substitute({"x1": parse_poly("x2 + 1")})
    assert sympy.expand(to_sympy(sub) - to_sympy(p).subs(x1, x2 + 1)) == 0


def test_grlex_printing_is_deterministic():
    p = parse_poly("x2 + x1^2 - 3/2*x1*x2 + 1")
    assert str(p) == str(parse_poly("1 + x2 - 3/2*x1*x2 + x1^2"))


def test_parse_errors_report_columns():
    with pytest.raises(ParseError) as e:
        parse_poly("x1 + 1.5")
    assert e.value.column is not None
    with pytest.raises(ParseError):
        parse_scalar("x1")


@given(polys(names=("x1", "t"), max_deg=2), st.integers(1, 3), st.integers(0, 2))
def test_expansion_matches_sympy_series(num, order_extra, k):
    den = parse_poly("1 + t*x1 - 2*t^2")
    f = ExpandableFraction("t", num, den, k)
    order = 3 + order_extra
    s = expand_fraction(f, order)
    t, x1 = sympy.symbols("t x1")
    expr = to_sympy(num) / to_sympy(den) / t ** k
    ref = sympy.series(expr, t, 0, order).removeO()
    for e in range(-k, order):
        mine = to_sympy(s.coeff(e))
        assert sympy.expand(mine - sympy.expand(ref).coeff(t, e)) == 0


def test_not_expandable():
    with pytest.raises(NotExpandable):
        expand_fraction(parse_fraction("1/(x2 + x1)", "x2"), 3)
    with pytest.raises(NotExpandable):
        expand_fraction(ExpandableFraction("t", MPoly.const(1), parse_poly("t")), 3)


matrices = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), min_size=n, max_size=n))


@given(matrices)
def test_char_poly_matches_sympy(rows):
    m = Matrix.of(rows)
    s = sympy.symbols("s")
    ref = sympy.Matrix(rows).charpoly(s).as_expr()
    assert sympy.expand(to_sympy(char_poly(m)) - ref) == 0


rect = st.tuples(st.integers(1, 4), st.integers(1, 5)).flatmap(
    lambda rc: st.lists(st.lists(st.integers(-2, 2), min_size=rc[1], max_size=rc[1]), min_size=rc[0], max_size=rc[0]))


@given(rect)
def test_rank_and_kernel_match_sympy(rows):
    m = Matrix.of(rows)
    ref = sympy.Matrix(rows)
    assert rank(m) == ref.rank()
    ker = kernel_basis(m)
    assert len(ker) == len(ref.nullspace())
    for v in ker:
        assert all(x == 0 for x in m.apply(v))
    assert sparse_rank([{j: Fraction(x) for j, x in enumerate(r)} for r in rows]) == ref.rank()


def test_skipped_pivot_columns():
    # first column zero: pivots must skip it
    m = Matrix.of([[0, 1, 2], [0, 2, 4], [0, 0, 1]])
    assert rank(m) == 2
    assert kernel_basis(m) == [(Fraction(1), Fraction(0), Fraction(0))]


def test_solve_and_inverse():
    m = Matrix.of([[2, 1], [1, 1]])
    assert solve(m, [3, 2]) == (Fraction(1), Fraction(1))
    assert inverse(m) @ m == Matrix.identity(2)
    assert solve(Matrix.of([[1, 1], [1, 1]]), [1, 2]) is None


def test_roots_and_factors():
    # (s - 1/2)^2 (s + 3)(s^2 + 1)
    s = sympy.symbols("s")
    expr = sympy.expand((s - sympy.Rational(1, 2)) ** 2 * (s + 3) * (s ** 2 + 1))
    coeffs = [Fraction(str(c)) for c in reversed(sympy.Poly(expr, s).all_coeffs())]
    assert sorted(rational_roots(coeffs)) == [Fraction(-3), Fraction(1, 2)]
    facs = eigen_factors(coeffs)
    rational = {v: m for v, _, m in facs if not isinstance(v, AlgebraicTag)}
    assert rational == {Fraction(-3): 1, Fraction(1, 2): 2}
    tags = [v for v, _, _ in facs if isinstance(v, AlgebraicTag)]
    assert len(tags) == 1 and tags[0].degree == 2


def test_quartic_residual_factoring():
    # (s^2 - 2)(s^2 + s + 1) has no rational roots; factors via the residual path
    p = parse_poly("(s^2 - 2)*(s^2 + s + 1)")
    facs = eigen_factors(univariate_coeffs(p, "s"))
    assert sorted(v.degree for v, _, _ in facs) == [2, 2]
