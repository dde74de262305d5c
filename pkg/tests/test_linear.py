import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from asd.algebra import AlgebraicTag, Matrix, parse_fraction
from asd.errors import PropertyLViolated
from asd.linear import (ConstantSystem, LinearModule, check_commuting, derham_linear, ext1_linear,
                        extract_restriction, joint_spectrum_decompose, koszul_bruteforce)
from asd.properties import Presentation


def M(rows):
    return Matrix.of(rows)


def test_check_commuting():
    assert check_commuting(ConstantSystem((M([[1, 0], [0, 2]]), M([[3, 0], [0, 4]])))) == (True, None)
    assert check_commuting(ConstantSystem((M([[0, 1], [0, 0]]), M([[0, 0], [1, 0]])))) == (False, (1, 2))
    assert check_commuting(ConstantSystem((M([[0, 1], [0, 0]]),))) == (True, None)


def test_joint_spectrum_examples():
    mod = joint_spectrum_decompose(ConstantSystem((M([[1, 0], [0, 2]]), M([[3, 0], [0, 4]]))))
    assert mod.multiset() == {(Fraction(1), Fraction(3)): 1, (Fraction(2), Fraction(4)): 1}
    nil = joint_spectrum_decompose(ConstantSystem((M([[0, 1], [0, 0]]),)))
    assert nil.multiset() == {(Fraction(0),): 2}
    rot = joint_spectrum_decompose(ConstantSystem((M([[0, -1], [1, 0]]),)))
    (blk,) = rot.blocks
    assert isinstance(blk.values[0], AlgebraicTag) and blk.degree == 2 and blk.multiplicity == 1


def test_derham_examples():
    assert derham_linear(LinearModule.from_forms(2, [((0, 0), 1)])) == [1, 0, 0]
    assert derham_linear(LinearModule.from_forms(2, [((1, 0), 1)])) == [0, 0, 0]
    assert derham_linear(LinearModule.from_forms(2, [((0, 0), 1), ((1, 0), 1)])) == [1, 0, 0]


def test_ext1_examples():
    a = LinearModule.from_forms(2, [((1, 0), 1)])
    b = LinearModule.from_forms(2, [((0, 1), 1)])
    zero = LinearModule.from_forms(2, [((0, 0), 1)])
    assert ext1_linear(a, b) == 0
    assert ext1_linear(zero, zero) == 0


def test_koszul_examples():
    r = koszul_bruteforce([((0,), 1)], 8)
    assert r.betti == [1, 0] and r.stabilized
    r = koszul_bruteforce([((1,), 1)], 8)
    assert r.betti == [0, 0] and r.stabilized


@pytest.mark.parametrize("seed", range(4))
def test_koszul_matches_derham(seed):
    rng = random.Random(seed)
    l = rng.randint(1, 2)
    forms = [(tuple(rng.choice([0, 0, 1, -2]) for _ in range(l)), rng.randint(1, 2)) for _ in range(2)]
    assert koszul_bruteforce(forms, 6).betti == derham_linear(LinearModule.from_forms(l, forms))


@st.composite
def commuting_systems(draw):
    """Conjugate simultaneous upper-triangular Jordan-compatible blocks."""
    n = draw(st.integers(1, 4))
    l = draw(st.integers(1, 2))
    values = [tuple(draw(st.integers(-2, 2)) for _ in range(l)) for _ in range(n)]
    p = sympy.randMatrix(n, n, -2, 2, seed=draw(st.integers(0, 10 ** 6)))
    while p.det() == 0:
        p = p + sympy.eye(n)
    mats = []
    for k in range(l):
        d = sympy.diag(*[v[k] for v in values])
        mats.append(Matrix.of([[Fraction(str(x)) for x in row] for row in (p * d * p.inv()).tolist()]))
    return values, ConstantSystem(tuple(mats))


@given(commuting_systems())
def test_joint_spectrum_matches_kernels(data):
    values, system = data
    mod = joint_spectrum_decompose(system)
    expect = {}
    for v in values:
        key = tuple(Fraction(x) for x in v)
        expect[key] = expect.get(key, 0) + 1
    assert mod.multiset() == expect


def _pres(coeffs, gens=("e",), deps=()):
    rel = {k: parse_fraction(v, "t1") for k, v in coeffs.items()}
    return Presentation(("t1",), ("y1",), gens, rel, deps)


def test_extract_restriction_single_generator():
    r = extract_restriction(_pres({(1, 1, 1): "3 + t1*y1"}))
    assert r.system.matrices[0] == M([[3]])
    assert r.module.multiset() == {(Fraction(3),): 1}


def test_extract_restriction_redundant_generators():
    # e2 = 2 e1
    p = _pres({(1, 1, 1): "3", (1, 2, 2): "3"}, gens=("e", "2e"), deps=((-2, 1),))
    r = extract_restriction(p)
    assert r.subfamily == (0,)
    assert r.module.multiset() == {(Fraction(3),): 1}


def test_extract_restriction_needs_L():
    with pytest.raises(PropertyLViolated):
        extract_restriction(_pres({(1, 1, 1): "y1"}))
