from fractions import Fraction

import pytest

from asd.algebra import Matrix, parse_fraction
from asd.connection import ElementaryModel, RegularPart, Summand
from asd.errors import IrrationalEigenvalue, StabilityFailure
from asd.lattices import (TauSection, check_stability, deligne_lattice, malgrange_lattice, ramified_pullback,
                          stability_rank)


def reg(rows):
    return RegularPart(Matrix.of(rows))


def test_deligne_examples():
    d = deligne_lattice(reg([["5/2"]]))
    assert d.shifts == (-2,) and d.shifted_eigenvalues() == (Fraction(1, 2),)
    assert deligne_lattice(reg([[0]])).shifts == (0,)
    assert deligne_lattice(reg([[0, 0], [0, "3/2"]])).shifts == (0, -1)


@pytest.mark.parametrize("value", ["-7/3", "0", "1", "5/2", "9"])
@pytest.mark.parametrize("lo", ["0", "-1/2", "1"])
def test_shift_is_minimal(value, lo):
    tau = TauSection(Fraction(lo))
    s = tau.shift_to_strip(Fraction(value))
    v = Fraction(value) + s
    assert tau.lo <= v < tau.lo + 1
    assert not (tau.lo <= v - 1 < tau.lo + 1)


def test_irrational_residue():
    with pytest.raises(IrrationalEigenvalue):
        deligne_lattice(reg([[0, 2], [1, 0]]))


def test_ramified_pullback():
    m = ElementaryModel.exponential(2, "1/x2")
    assert ramified_pullback(m, 1) == m
    r = ramified_pullback(m, 2)
    assert r.summands[0].phi.normalized() == parse_fraction("1/x2^2", "x2").normalized()
    mr = ElementaryModel(2, (Summand(parse_fraction("0", "x2"), reg([["1/3"]])),))
    assert ramified_pullback(mr, 2).summands[0].reg.residue == Matrix.of([["2/3"]])


def test_stability_examples():
    m = ElementaryModel.exponential(2, "1/x2")
    lat = malgrange_lattice(m)
    assert check_stability(lat, 1).stable
    with pytest.raises(StabilityFailure) as e:
        check_stability(lat, 0)
    assert e.value.witness["coefficient"] == "-1/x2"
    regular = ElementaryModel(2, (Summand(parse_fraction("0", "x2"), reg([["5/2"]])),))
    assert check_stability(malgrange_lattice(regular), 0).stable


def test_receipts_reverify():
    """Recompute x_2^2 d_2 on the basis vector directly from phi."""
    m = ElementaryModel.exponential(2, "x1/x2^2")
    lat = malgrange_lattice(m)
    rep = check_stability(lat, stability_rank(m))
    d2 = [r for r in rep.receipts if r["operator"] == "x2^3*d_x2"][0]
    expect = (parse_fraction("x1/x2^2", "x2").diff("x2") * parse_fraction("x2^3", "x2")).normalized()
    assert d2["image"] == {"e1.1": str(expect)}


def test_tensor_with_residue():
    m = ElementaryModel(2, (Summand(parse_fraction("1/x2", "x2"), reg([["5/2"]])),))
    lat = malgrange_lattice(m)
    assert lat.labels() == ["x2^-2*e1.1"]
    assert check_stability(lat, 1).stable
