from fractions import Fraction

import pytest

from asd.algebra import parse_fraction
from asd.connection import ElementaryModel
from asd.errors import LatticeNotStable
from asd.linear import extract_restriction
from asd.properties import (Presentation, check_property_L, check_property_L_fraction,
                            check_property_P, graded_generators, l_algebra_closure, synthesize_Ha)

T2, Y2 = ("t1", "t2"), ("y1", "y2")


def L(text):
    return check_property_L_fraction(parse_fraction(text, "t2"), T2, Y2, None)


def test_property_L_examples():
    assert L("t1*y1").holds
    v = L("y1")
    assert not v.holds and v.witness.nu == (0, 0) and v.witness.monomial == "y1"
    for a in (1, 2, 3):
        assert L(f"1/(1 + y2*t2^{a})").holds


def test_property_L_checks_denominators():
    # y-degree 2 at nu = 0 in the denominator
    v = L("1/(1 - y1*y2)")
    assert not v.holds


def _pres(text):
    return Presentation(T2, Y2, ("g",), {(2, 1, 1): parse_fraction(text, "t2")})


def test_property_P_examples():
    assert not check_property_P(_pres("1/t2")).holds
    assert check_property_P(_pres("1/(1 + t2)")).holds
    assert check_property_P(_pres("t2*y1/(1 + y2*t2)")).holds


def test_closure_examples():
    assert l_algebra_closure(parse_fraction("t2*y1", "t2"), T2, Y2).holds
    prod = parse_fraction("t2*y1", "t2") * parse_fraction("t2*y2", "t2")
    assert check_property_L_fraction(prod, T2, Y2, None).holds
    c = l_algebra_closure(parse_fraction("1/(1 + y2*t2)", "t2"), T2, Y2)
    assert c.holds
    euler = dict((op, res) for op, res, _ in c.items)["t_n*d_t_n"]
    assert parse_fraction(euler, "t2").normalized() == parse_fraction("-y2*t2/(1 + y2*t2)^2", "t2").normalized()


def test_synthesize_exponential():
    m = ElementaryModel.exponential(2, "1/x2")
    p = synthesize_Ha(m, 1)
    assert p.coefficient(1, 1, 1).is_zero()
    assert p.coefficient(2, 1, 1).normalized() == parse_fraction("-1/(1 + y2*t2)^2", "t2").normalized()
    assert check_property_L(p).holds and check_property_P(p).holds
    r = extract_restriction(p)
    assert r.module.multiset() == {(Fraction(0), Fraction(-1)): 1}


def test_synthesize_unstable_lattice():
    m = ElementaryModel.exponential(2, "1/x2^2")
    with pytest.raises(LatticeNotStable):
        synthesize_Ha(m, 1)
    p = synthesize_Ha(m, 1, allow_unstable=True)
    v = check_property_L(p)
    assert not v.holds
    assert v.witness.to_json() == {"coefficient": [2, 1, 1], "part": "expansion", "nu": [0, -1],
                                   "monomial": "-2*t2^-1"}


def test_graded_generators():
    p = synthesize_Ha(ElementaryModel.exponential(2, "1/x2"), 1)
    assert graded_generators(p, 0, 1) is p
    g = graded_generators(p, 1, 1)
    assert len(g.generators) == 3 and check_property_L(g).holds
    g2 = graded_generators(p, 1, 2)
    assert len(g2.generators) == 6 and check_property_L(g2).holds
