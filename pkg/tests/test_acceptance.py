"""Acceptance criteria 1-8.  Each test prints one PASS/FAIL line."""
import json
import os
import random
import subprocess
import sys
import time
from contextlib import contextmanager
from fractions import Fraction
from importlib import resources
from pathlib import Path

import pytest
import sympy

from asd.algebra import Matrix
from asd.cli import run_specialize
from asd.connection import katz_generic_rank
from asd.dilatation import as_spectrum
from asd.errors import StabilityFailure
from asd.io import load
from asd.lattices import check_stability, malgrange_lattice
from asd.linear import (ConstantSystem, LinearModule, derham_linear, ext1_linear, extract_restriction,
                        hom_forms, joint_spectrum_decompose, koszul_bruteforce)
from asd.connection import ElementaryModel
from asd.properties import check_property_L, synthesize_Ha
from asd.vfiltration import (Component, OneVarModule, bernstein, compare_filtrations, generated_filtration,
                             gr_psi, lattice_to_goodV, localization_invariance, section, verify_bernstein)

CORPUS = Path(resources.files("asd").joinpath("data/corpus"))


@contextmanager
def criterion(request, number, title):
    start = time.perf_counter()
    info = {}
    try:
        yield info
    except BaseException:
        line = f"CRITERION {number} FAIL  {title}"
        raise
    else:
        line = f"CRITERION {number} PASS  {title}"
    finally:
        elapsed = time.perf_counter() - start
        extra = "; ".join(f"{k}={v}" for k, v in info.items())
        with request.config.pluginmanager.getplugin("capturemanager").global_and_fixture_disabled():
            print(f"\n{line}  [{elapsed:.2f}s{'; ' + extra if extra else ''}]")


def elementary_corpus():
    out = []
    for f in sorted(CORPUS.glob("*.json")):
        cf = load(f)
        if cf.kind == "elementary":
            out.append((f.name, cf))
    return out


# -- 1 ----------------------------------------------------------------------

POINT_CANDIDATES = [Fraction(v) for v in ("1", "2", "-1", "1/2", "3", "-3/2", "5")]


def _oracle(phi_text, n, r, point, a):
    """sum_{i<n} d_i f(x, 0) y_i - r f(x, 0) y_n  (a = r), 0 (a > r)."""
    xs = sympy.symbols(" ".join(f"x{i}" for i in range(1, n + 1)), seq=True)
    f = sympy.cancel(sympy.sympify(phi_text.replace("^", "**")) * xs[-1] ** r)
    assert f.is_polynomial(*xs)
    if a > r:
        return tuple([Fraction(0)] * n)
    subs = {xs[-1]: 0, **{xs[i]: sympy.Rational(str(point[i])) for i in range(n - 1)}}
    coeffs = [sympy.diff(f, xs[i]).subs(subs) for i in range(n - 1)] + [-r * f.subs(subs)]
    return tuple(Fraction(str(c)) for c in coeffs)


def _points(phi_text, n, r):
    xs = sympy.symbols(" ".join(f"x{i}" for i in range(1, n + 1)), seq=True)
    f0 = sympy.cancel(sympy.sympify(phi_text.replace("^", "**")) * xs[-1] ** r).subs(xs[-1], 0)
    if n == 1:
        return [()]
    pts = []
    rng = random.Random(n * 100 + r)
    while len(pts) < 3:
        p = tuple(rng.choice(POINT_CANDIDATES) for _ in range(n - 1))
        if p not in pts and f0.subs({xs[i]: sympy.Rational(str(p[i])) for i in range(n - 1)}) != 0:
            pts.append(p)
    return pts


def test_criterion_1_linearity(request):
    with criterion(request, 1, "fiber forms are linear and match the differentiation oracle") as info:
        start = time.perf_counter()
        models = points = runs = 0
        for name, cf in elementary_corpus():
            m = cf.model
            if len(m.summands) != 1 or m.summands[0].pole_order < 1:
                continue
            (s,) = m.summands
            n, r, rank = m.n, s.pole_order, s.rank
            assert n <= 3 and 1 <= r <= 3 and rank <= 2
            phi_text = str(s.phi.normalized())
            models += 1
            for pt in _points(phi_text, n, r):
                points += 1
                for a in (r, r + 1):
                    bind = ",".join(f"x{i + 1}={c}" for i, c in enumerate(pt))
                    res, code = run_specialize(cf, a, bind, None)
                    runs += 1
                    assert code != 3, (name, a, pt)
                    assert not res["nonlinear"] and all(p["status"] == "linear" for p in res["pairs"])
                    expect = _oracle(phi_text, n, r, pt, a)
                    got = [(tuple(Fraction(c) for c in f["coefficients"]), f["multiplicity"]) for f in res["forms"]]
                    assert got == [(expect, rank * rank)], (name, a, pt, got, expect)
        elapsed = time.perf_counter() - start
        info.update(models=models, points=points, runs=runs)
        assert models >= 20
        assert elapsed < 30


# -- 2 ----------------------------------------------------------------------

def test_criterion_2_two_routes(request):
    with criterion(request, 2, "extract_restriction(synthesize_Ha) equals the as_spectrum diagonal") as info:
        cases = 0
        for name, cf in elementary_corpus():
            m = cf.model
            rho = katz_generic_rank(m).rho
            if rho < 1:
                continue
            k0 = malgrange_lattice(m).d_generating_k0()
            for a in (int(rho), int(rho) + 1):
                pres = synthesize_Ha(m, a, k0=k0, point=cf.point)
                got = extract_restriction(pres).module.multiset()
                diag = as_spectrum(m, a, cf.point or ()).diagonal
                expect = {f.coefficients: f.multiplicity for f in diag}
                assert got == expect, (name, a, got, expect)
                cases += 1
        info.update(cases=cases)
        assert cases >= 40


# -- 3 ----------------------------------------------------------------------

def _random_module(rng, l):
    forms = []
    total = 0
    rank = rng.randint(1, 4)
    while total < rank:
        mult = rng.randint(1, rank - total)
        forms.append((tuple(rng.randint(-2, 2) for _ in range(l)), mult))
        total += mult
    return LinearModule.from_forms(l, forms)


def test_criterion_3_ext_and_derham(request):
    with criterion(request, 3, "Ext^1 vanishes and de Rham agrees with brute-force Koszul") as info:
        start = time.perf_counter()
        rng = random.Random(20261015)
        cache = {}

        def brute_b1(form):
            if form not in cache:
                cache[form] = koszul_bruteforce([(form, 1)], 5).betti[1]
            return cache[form]

        for _ in range(25):
            l = rng.randint(1, 3)
            m1, m2 = _random_module(rng, l), _random_module(rng, l)
            assert ext1_linear(m1, m2) == 0
            # independent: H^1 of the Hom module by elimination
            assert sum(brute_b1(d) * mult for d, mult, _ in hom_forms(m1, m2)) == 0
        agree = 0
        for _ in range(10):
            l = rng.randint(1, 3)
            forms = [(tuple(rng.choice([0, 0, 1, -1, 2]) for _ in range(l)), rng.randint(1, 2))
                     for _ in range(rng.randint(1, 3))]
            kz = koszul_bruteforce(forms, 8)
            assert kz.stabilized
            assert kz.betti == derham_linear(LinearModule.from_forms(l, forms)), forms
            agree += 1
        elapsed = time.perf_counter() - start
        info.update(ext1_pairs=25, koszul_cases=agree)
        assert elapsed < 10


# -- 4 ----------------------------------------------------------------------

def _commuting_system(rng):
    size = rng.randint(1, 6)
    l = rng.randint(1, 3)
    blocks, values = [], []
    left = size
    while left:
        k = rng.randint(1, left)
        left -= k
        v = tuple(Fraction(rng.randint(-3, 3), rng.choice([1, 1, 2])) for _ in range(l))
        c = tuple(rng.randint(0, 2) for _ in range(l))
        blocks.append((k, v, c))
        values.append(v)
    mats = []
    for i in range(l):
        d = sympy.zeros(size, size)
        off = 0
        for k, v, c in blocks:
            for j in range(k):
                d[off + j, off + j] = sympy.Rational(v[i].numerator, v[i].denominator)
                if j + 1 < k:
                    d[off + j, off + j + 1] = c[i]
            off += k
        mats.append(d)
    p = sympy.randMatrix(size, size, -2, 2, seed=rng.randint(0, 10 ** 6))
    while p.det() == 0:
        p = p + sympy.eye(size)
    pinv = p.inv()
    conj = [p * d * pinv for d in mats]
    return ConstantSystem(tuple(Matrix.of([[Fraction(str(x)) for x in row] for row in b.tolist()]) for b in conj)), conj


def _kernel_dims(conj):
    """dim of the joint generalized eigenspace for every joint eigenvalue."""
    size = conj[0].shape[0]
    eig = [set(b.eigenvals()) for b in conj]
    out = {}
    from itertools import product
    for v in product(*eig):
        stack = sympy.Matrix.vstack(*[(b - val * sympy.eye(size)) ** size for b, val in zip(conj, v)])
        dim = size - stack.rank()
        if dim:
            out[tuple(Fraction(str(x)) for x in v)] = dim
    return out


def test_criterion_4_joint_spectrum(request):
    with criterion(request, 4, "joint spectrum multiplicities equal kernel dimensions") as info:
        rng = random.Random(4)
        for _ in range(15):
            system, conj = _commuting_system(rng)
            assert joint_spectrum_decompose(system).multiset() == _kernel_dims(conj)
        info.update(systems=15)


# -- 5 ----------------------------------------------------------------------

def test_criterion_5_property_L(request):
    with criterion(request, 5, "synthesized presentations satisfy property L; 1/x_n^2 at a=1 violates it") as info:
        cases, windows = 0, set()
        for name, cf in elementary_corpus():
            m = cf.model
            rho = int(katz_generic_rank(m).rho)
            for a in (max(rho, 1), max(rho, 1) + 1):
                pres = synthesize_Ha(m, a, point=cf.point)
                v = check_property_L(pres)
                assert v.holds, (name, a, v.witness)
                # window soundness: a longer expansion gives the same verdict
                assert check_property_L(pres, 2 * v.window + 8).holds
                windows.add(v.window)
                cases += 1
        bad = synthesize_Ha(ElementaryModel.exponential(2, "1/x2^2"), 1, allow_unstable=True)
        v = check_property_L(bad)
        assert not v.holds and v.witness is not None
        assert v.witness.to_json() == {"coefficient": [2, 1, 1], "part": "expansion", "nu": [0, -1],
                                       "monomial": "-2*t2^-1"}
        info.update(cases=cases, windows=f"{min(windows)}..{max(windows)}", witness=v.witness.monomial)


# -- 6 ----------------------------------------------------------------------

def test_criterion_6_vfiltration(request):
    with criterion(request, 6, "Bernstein, canonical V, Psi, good V-filtrations") as info:
        start = time.perf_counter()
        laurent = OneVarModule.of(Component.monomial(0))
        exp = OneVarModule.of(Component.exponential(1))
        one, inv, e = section((0, 1, 1)), section((-1, 1, 1)), section((0, 1, 1))

        b = bernstein(laurent, one)
        assert b.b_string() == "s" and verify_bernstein(laurent, one, b)
        assert laurent.tdt(one) == {}                       # t d_t 1 = 0
        b = bernstein(laurent, inv)
        assert b.b_string() == "s + 1" and verify_bernstein(laurent, inv, b)
        assert laurent.tdt(inv) == {(-1, 0): Fraction(-1)}   # (t d_t + 1) t^-1 = 0
        b = bernstein(exp, e)
        assert b.b == (Fraction(1),) and verify_bernstein(exp, e, b)
        assert {k: -v for k, v in exp.mul_t(exp.tdt(e)).items()} == e   # e = -t (t d_t) e
        assert gr_psi(exp) == []
        (piece,) = gr_psi(laurent)
        assert piece.a == -1 and piece.dimension == 1

        inv_cases = [
            OneVarModule.of(Component.structure()),
            exp,
            laurent,
            OneVarModule.of(Component.structure(), Component.monomial(Fraction(1, 2))),
            OneVarModule.of(Component("regular", Matrix.of([[0, 1], [0, 0]])), Component.exponential(2, 2)),
        ]
        assert all(localization_invariance(m).holds for m in inv_cases)

        lattices = [
            (laurent, [0], 1),
            (laurent, [1], 2),
            (OneVarModule.of(Component.monomial(Fraction(1, 2))), [0], 0),
            (OneVarModule.of(Component("regular", Matrix.of([[0, 1], [0, 0]]))), [0, 0], 1),
            (OneVarModule.of(Component("regular", Matrix.diag([Fraction(0), Fraction(2)]))), [0, 0], 3),
        ]
        for m, exps, k0 in lattices:
            g = lattice_to_goodV(exps, m, check_bound=5)
            assert g.k0 == k0
            assert [c["k"] for c in g.checks if "holds" in c] == list(range(6))
            assert all(c["holds"] for c in g.checks if "holds" in c)
            if k0:
                assert g.checks[-1]["k0_minus_one"] == k0 - 1 and g.checks[-1]["fails_at"]

        c = compare_filtrations(lattice_to_goodV([0], laurent), generated_filtration(laurent, inv))
        assert (c.k1, c.k2) == (-1, 1)
        elapsed = time.perf_counter() - start
        info.update(invariance_cases=len(inv_cases), lattices=len(lattices))
        assert elapsed < 10


# -- 7 ----------------------------------------------------------------------

def test_criterion_7_malgrange(request):
    with criterion(request, 7, "Malgrange lattices are stable at rho and fail at rho - 1") as info:
        stable = failing = 0
        for name, cf in elementary_corpus():
            m = cf.model
            rho = katz_generic_rank(m).rho
            assert rho.denominator == 1
            lat = malgrange_lattice(m)
            assert check_stability(lat, int(rho)).stable, name
            stable += 1
            if rho >= 1:
                with pytest.raises(StabilityFailure) as exc:
                    check_stability(lat, int(rho) - 1)
                w = exc.value.witness
                assert w["pole_order"] >= 1 and w["coefficient"] and w["operator"], name
                failing += 1
        info.update(stable=stable, fail_at_rho_minus_1=failing)


# -- 8 ----------------------------------------------------------------------

def test_criterion_8_determinism(request, tmp_path):
    with criterion(request, 8, "asd corpus output is byte-identical across runs") as info:
        env = dict(os.environ)
        env.pop("ASD_TRUNCATION", None)
        cmd = [sys.executable, "-m", "asd.cli", "corpus", str(CORPUS)]
        first = subprocess.run(cmd, capture_output=True, env=env)
        second = subprocess.run(cmd, capture_output=True, env=env)
        assert first.returncode == 0 and second.returncode == 0
        assert first.stdout == second.stdout
        data = json.loads(first.stdout)
        info.update(files=data["count"], bytes=len(first.stdout))
