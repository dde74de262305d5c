from fractions import Fraction

import pytest
import sympy

from asd.algebra import MPoly, parse_fraction, parse_poly
from asd.connection import ElementaryModel
from asd.dilatation import (LinearForm, as_spectrum, build_chart, fiber_linear_form, pull_p1, twist_series)
from asd.errors import BadParameters, RankTooSmall, ZeroRank



def test_chart_coordinates():
    c = build_chart(2, 1)
    b = c.p1_bindings()
    assert b["x1"] == parse_poly("t1 + y1*t2")
    assert b["x2"] == parse_poly("t2 + y2*t2^2")
    assert build_chart(1, 2).p1_bindings()["x1"] == parse_poly("t1 + y1*t1^3")
    with pytest.raises(BadParameters):
        build_chart(2, 0)


def test_pullbacks():
    c = build_chart(2, 1)
    assert pull_p1(c, parse_poly("x1"), 3).to_poly() == parse_poly("t1 + y1*t2")
    assert pull_p1(c, parse_poly("x2"), 3).to_poly() == parse_poly("t2 + y2*t2^2")
    s = pull_p1(c, parse_fraction("1/x2", "x2"), 2)
    assert s.coeff(-1) == MPoly.const(1)
    assert s.coeff(0) == parse_poly("-y2")
    assert s.coeff(1) == parse_poly("y2^2")


def test_twist():
    c = build_chart(2, 1)
    s = twist_series(c, parse_fraction("1/x2", "x2"), 2)
    assert s.coeff(-1).is_zero() and s.coeff(0) == parse_poly("-y2") and s.coeff(1) == parse_poly("y2^2")
    s2 = twist_series(build_chart(2, 2), parse_fraction("1/x2", "x2"), 4)
    assert s2.coeff(0).is_zero()
    s3 = twist_series(build_chart(2, 1), parse_fraction("x1^2 + x2", "x2"), 4)
    assert s3.coeff(0).is_zero()


def oracle(f_text, n, r, point, a):
    """sum_i d_i f(x, 0) y_i - r f(x, 0) y_n for a = r, zero for a > r."""
    xs = sympy.symbols(" ".join(f"x{i}" for i in range(1, n + 1)))
    xs = xs if isinstance(xs, tuple) else (xs,)
    f = sympy.sympify(f_text.replace("^", "**"))
    if a > r:
        return tuple([Fraction(0)] * n)
    subs = {xs[-1]: 0, **{xs[i]: sympy.Rational(str(point[i])) for i in range(n - 1)}}
    coeffs = [sympy.diff(f, xs[i]).subs(subs) for i in range(n - 1)] + [-r * f.subs(subs)]
    return tuple(Fraction(str(c)) for c in coeffs)


@pytest.mark.parametrize("f,n,r,point", [
    ("1", 2, 1, (Fraction(0),)),
    ("x1", 2, 2, (Fraction(3),)),
    ("x1^2 + x1*x2 + 1", 2, 2, (Fraction(-1),)),
    ("x1*x2 + 1", 3, 2, (Fraction(1), Fraction(2))),
    ("x1^3 - x1 + 2", 2, 3, (Fraction(1, 2),)),
])
@pytest.mark.parametrize("extra", [0, 1])
def test_fiber_form_matches_differentiation_oracle(f, n, r, point, extra):
    a = r + extra
    phi = parse_fraction(f"({f})/x{n}^{r}", f"x{n}")
    form = fiber_linear_form(build_chart(n, a), phi, point)
    assert isinstance(form, LinearForm)
    assert form.coefficients == oracle(f, n, r, point, a)
    # a second, longer truncation gives the same form
    assert fiber_linear_form(build_chart(n, a), phi, point, order=30) == form


def _forms(rep):
    return sorted(str(f) for f in rep.surviving)


def test_as_spectrum_examples():
    m = ElementaryModel.exponential(2, "1/x2")
    rep = as_spectrum(m, 1, (Fraction(7),))
    assert _forms(rep) == ["-y2"] and not rep.killed
    m2 = m + ElementaryModel.exponential(2, "2/x2")
    rep = as_spectrum(m2, 1, (Fraction(0),))
    assert _forms(rep) == ["-2*y2", "-y2"]
    assert sorted(p.witness for p in rep.killed) == ["-1/x2", "1/x2"]
    m3 = ElementaryModel.exponential(2, "x1/x2") + ElementaryModel.exponential(2, "-x1/x2")
    rep = as_spectrum(m3, 1, (Fraction(0),))
    assert _forms(rep) == ["-y1", "y1"]
    assert len(rep.flags) == 2 and not rep.killed


def test_as_spectrum_preconditions():
    with pytest.raises(RankTooSmall):
        as_spectrum(ElementaryModel.exponential(2, "x1/x2^2"), 1, (Fraction(1),))
    with pytest.raises(ZeroRank):
        as_spectrum(ElementaryModel.exponential(2, "x1"), 1, (Fraction(1),))
    with pytest.raises(BadParameters):
        as_spectrum(ElementaryModel.exponential(2, "1/x2"), 1, ())


def test_multiplicity_counts_ranks():
    m = ElementaryModel.exponential(2, "1/x2", rank=2)
    rep = as_spectrum(m, 1, (Fraction(0),))
    assert [(str(f), f.multiplicity) for f in rep.surviving] == [("-y2", 4)]
