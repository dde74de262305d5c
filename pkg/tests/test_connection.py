from fractions import Fraction

import pytest

from asd.algebra import Matrix, MPoly, parse_fraction
from asd.connection import (ElementaryModel, MatrixConnection, RegularPart, Summand, check_integrability, dual,
                            hom_model, katz_generic_rank, normalize)


def E(phi, n=2, residue=None):
    reg = RegularPart(Matrix.of(residue)) if residue else RegularPart.trivial()
    return ElementaryModel(n, (Summand(parse_fraction(phi, f"x{n}"), reg),))


def test_integrability():
    zero = Matrix.of([[0, 0], [0, 0]])
    assert check_integrability(MatrixConnection(2, (zero, zero))) == (True, None)
    a1 = Matrix.of([[0, 1], [0, 0]]).map(lambda c: parse_fraction(str(c), "x2"))
    a2 = Matrix.of([[0, 0], [1, 0]]).map(lambda c: parse_fraction(str(c), "x2"))
    assert check_integrability(MatrixConnection(2, (a1, a2))) == (False, (1, 2))
    pot = MatrixConnection.from_potential(2, parse_fraction("x1/x2^2", "x2"))
    assert check_integrability(pot) == (True, None)


def test_dual_is_an_involution():
    m = E("1/x2", residue=[["1/2"]])
    d = dual(m)
    assert str(d.summands[0].phi.normalized()) == str(parse_fraction("-1/x2", "x2").normalized())
    assert d.summands[0].reg.residue == Matrix.of([["-1/2"]])
    assert dual(d) == m


def _phis(m):
    return sorted((str(s.phi.normalized()), s.rank) for s in m.summands)


def test_hom_models():
    assert _phis(normalize(hom_model(E("1/x2"), E("1/x2")))) == [("0", 1)]
    assert _phis(hom_model(E("2/x2"), E("1/x2"))) == [("-1/x2", 1)]
    both = E("1/x2") + E("2/x2")
    h = normalize(hom_model(both, both))
    assert _phis(h) == [("-1/x2", 1), ("0", 2), ("1/x2", 1)]
    assert sum(s.rank for s in h.summands) == 4


def test_normalize():
    f = parse_fraction("x2/x2^2", "x2").normalized()
    assert f.pole_order == 1 and f.num == MPoly.const(1)
    m = E("1/x2") + E("1/x2 + x1")
    nm = normalize(m)
    assert normalize(nm) == nm
    classes = nm.polar_classes()
    assert len(classes) == 1 and classes[0][1] == 2


@pytest.mark.parametrize("model,rho", [
    (E("1/x2"), 1),
    (E("x1/x2^2") + E("0", residue=[["1/3"]]), 2),
    (E("(x1^3 + 1)/x2^3"), 3),
    (E("0", residue=[["5/2"]]), 0),
])
def test_katz_elementary(model, rho):
    assert katz_generic_rank(model).rho == rho


def test_katz_matrix_agrees_with_elementary():
    phi = parse_fraction("x1/x2^2", "x2")
    k = katz_generic_rank(MatrixConnection.from_potential(2, phi))
    assert k.rho == katz_generic_rank(E("x1/x2^2")).rho == 2


def test_katz_fractional_slope():
    a = Matrix(tuple(tuple(parse_fraction(c, "x1") for c in row) for row in [["0", "1"], ["1/x1^3", "0"]]))
    k = katz_generic_rank(MatrixConnection(1, (a,)))
    assert k.rho == Fraction(1, 2) and not k.integral


def test_katz_diagonal_matrix():
    a = Matrix.diag([parse_fraction("1/x1^2", "x1"), parse_fraction("1/x1^3", "x1")])
    assert katz_generic_rank(MatrixConnection(1, (a,))).rho == 2
