"""Command line interface ``asd``.

Exit codes: 0 success, 1 usage or parse error, 2 precondition violation,
3 a falsifier fired (non-linear limit, unstable lattice at the Katz rank,
property L failing for a >= rho, non-commuting restriction).
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from . import __version__
from .algebra import parse_scalar
from .algebra.mpoly import format_scalar
from .connection import MatrixConnection, check_integrability, coords, katz_generic_rank
from .dilatation import as_spectrum, default_truncation
from .errors import AsdError, BadParameters, CommutationFailure, NotCommuting, PreconditionError, Unsupported, UsageError
from .io import ConnectionFile, dumps, load, serialize
from .lattices import TauSection, check_stability, malgrange_lattice
from .linear import check_commuting, extract_restriction, joint_spectrum_decompose
from .properties import check_property_L, check_property_P, synthesize_Ha
from .vfiltration import (Component, OneVarModule, bernstein, gr_psi, lattice_to_goodV,
                          localization_invariance, restriction_complex)

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_FALSIFIER = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, UsageError):
        return EXIT_USAGE
    if isinstance(exc, CommutationFailure):
        return EXIT_FALSIFIER
    return EXIT_PRECONDITION


def error_json(exc: BaseException) -> dict:
    out = {"error": type(exc).__name__, "message": str(exc), "exit_code": exit_code_for(exc)}
    witness = getattr(exc, "witness", None)
    if witness is not None:
        out["witness"] = witness
    return out


# -- helpers ------------------------------------------------------------------

def parse_point(text: str, n: int) -> Tuple[Fraction, ...]:
    """``"x1=1,x2=-1/2"`` (missing coordinates default to 0) or ``"1,-1/2"``."""
    names = coords(n)[:-1]
    items = [s.strip() for s in text.split(",") if s.strip()]
    if items and all("=" not in s for s in items):
        if len(items) != len(names):
            raise UsageError(f"--point needs {len(names)} values")
        return tuple(parse_scalar(v) for v in items)
    values = {x: Fraction(0) for x in names}
    for s in items:
        if "=" not in s:
            raise UsageError(f"bad binding {s!r}; use name=value")
        k, v = (p.strip() for p in s.split("=", 1))
        if k not in values:
            raise UsageError(f"unknown coordinate {k!r}; the divisor has coordinates {', '.join(names) or 'none'}")
        values[k] = parse_scalar(v)
    return tuple(values[x] for x in names)


def truncation_setting(flag: Optional[int]) -> Tuple[Optional[int], str]:
    if flag is not None:
        return flag, "flag"
    env = os.environ.get("ASD_TRUNCATION")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise UsageError(f"ASD_TRUNCATION must be an integer, got {env!r}") from None
        if value < 1:
            raise UsageError("ASD_TRUNCATION must be positive")
        return value, "ASD_TRUNCATION"
    return None, "default"


def _need(cf: ConnectionFile, *kinds: str):
    if cf.kind not in kinds:
        raise Unsupported(f"this command takes {' or '.join(kinds)} input, got {cf.kind}")


def _rho(cf: ConnectionFile):
    if isinstance(cf.model, MatrixConnection):
        ok, pair = check_integrability(cf.model)
        if not ok:
            raise BadParameters(f"connection is not integrable: curvature ({pair[0]},{pair[1]}) is nonzero")
    return katz_generic_rank(cf.model)


def _default_a(cf: ConnectionFile, a: Optional[int]) -> int:
    if a is not None:
        return a
    if cf.a is not None:
        return cf.a
    rho = katz_generic_rank(cf.model).rho
    return max(1, int(rho)) if rho.denominator == 1 else 1


def _point(cf: ConnectionFile, text: Optional[str]):
    if text is not None:
        return parse_point(text, cf.n)
    if cf.point is not None:
        return cf.point
    return tuple(Fraction(0) for _ in range(cf.n - 1))


def onevar_of(cf: ConnectionFile) -> OneVarModule:
    if cf.kind == "onevar":
        return cf.model
    if cf.kind == "elementary" and cf.n == 1:
        comps = []
        for s in cf.model.summands:
            phi = s.phi.normalized()
            polar = phi.polar_part().normalized()
            if polar.is_zero():
                comps.append(Component("regular", s.reg.residue))
                continue
            num = polar.num
            if not (num.is_constant() and polar.den.is_constant()):
                raise Unsupported(f"only c/t^r exponential factors are supported, got {polar}")
            c = num.constant_term() / polar.den.constant_term()
            comps.append(Component("exponential", s.reg.residue, c, polar.pole_order))
        return OneVarModule(tuple(comps))
    raise Unsupported(f"this command takes onevar or one-dimensional elementary input, got {cf.kind} (n={cf.n})")


# -- commands -----------------------------------------------------------------

def run_katz(cf: ConnectionFile) -> Tuple[dict, int]:
    _need(cf, "elementary", "matrix")
    k = _rho(cf)
    return {"rho": str(k), "integral": k.integral, "method": k.method}, EXIT_OK


def run_specialize(cf: ConnectionFile, a: Optional[int], point: Optional[str],
                   truncation: Optional[int]) -> Tuple[dict, int]:
    _need(cf, "elementary")
    a = _default_a(cf, a)
    pt = _point(cf, point)
    trunc, source = truncation_setting(truncation)
    rep = as_spectrum(cf.model, a, pt, trunc)
    pairs = []
    for p in rep.pairs:
        d: Dict[str, Any] = {"pair": list(p.pair), "multiplicity": p.multiplicity, "status": p.status}
        if p.form is not None:
            d["form"] = str(p.form)
        if p.witness is not None:
            d["witness"] = p.witness
        pairs.append(d)
    res = {"a": a, "point": [format_scalar(c) for c in pt], "rho": format_scalar(rep.rho),
           "truncation": {"order": rep.truncation, "source": source,
                          "default": default_truncation(int(rep.rho), a)},
           "forms": [f.to_json() for f in rep.surviving],
           "diagonal": [f.to_json() for f in rep.diagonal],
           "turning_points": [list(p.pair) for p in rep.flags],
           "nonlinear": [{"pair": list(p.pair), "monomial": p.witness} for p in rep.nonlinear],
           "pairs": pairs}
    return res, EXIT_FALSIFIER if rep.nonlinear else EXIT_OK


def run_check_l(cf: ConnectionFile, a: Optional[int], point: Optional[str],
                allow_unstable: bool = False, order: Optional[int] = None) -> Tuple[dict, int]:
    _need(cf, "elementary", "presentation")
    res: Dict[str, Any] = {}
    falsifier = False
    if cf.kind == "elementary":
        a = _default_a(cf, a)
        pt = _point(cf, point)
        rho = katz_generic_rank(cf.model).rho
        pres = synthesize_Ha(cf.model, a, point=pt, allow_unstable=allow_unstable)
        res.update({"a": a, "rho": format_scalar(rho), "point": [format_scalar(c) for c in pt],
                    "generators": list(pres.generators), "relations": len(pres.relations)})
    else:
        pres = cf.model
        rho = None
    lv = check_property_L(pres, order)
    pv = check_property_P(pres)
    res["property_L"] = lv.to_json()
    res["property_P"] = pv.to_json()
    if cf.kind == "elementary" and rho is not None and a >= rho and not lv.holds:
        falsifier = True
    return res, EXIT_FALSIFIER if falsifier else EXIT_OK


def run_psi(cf: ConnectionFile) -> Tuple[dict, int]:
    m = onevar_of(cf)
    sections = list(cf.sections) or [{(0, g): Fraction(1)} for g in range(m.rank)]
    res: Dict[str, Any] = {"psi": [p.to_json() for p in gr_psi(m)],
                           "bernstein": [bernstein(m, s).to_json() for s in sections],
                           "localization_invariance": localization_invariance(m).to_json(),
                           "restriction": restriction_complex(m).to_json()}
    if cf.lattice is not None:
        try:
            res["good_V"] = lattice_to_goodV(cf.lattice, m).to_json()
        except PreconditionError as e:
            res["good_V"] = error_json(e)
    return res, EXIT_OK


def run_lattice(cf: ConnectionFile, tau_lo: Fraction = Fraction(0)) -> Tuple[dict, int]:
    _need(cf, "elementary")
    k = katz_generic_rank(cf.model)
    if not k.integral:
        raise BadParameters(f"Katz rank {k} is not an integer")
    lat = malgrange_lattice(cf.model, TauSection(tau_lo))
    rep = check_stability(lat, int(k.rho), raise_on_failure=False)
    res = {"tau_strip": [format_scalar(tau_lo), format_scalar(tau_lo + 1)], "rho": str(k),
           "basis": lat.labels(),
           "summands": [{"phi": str(s.phi.normalized()), "shifts": list(d.shifts),
                         "eigenvalues": [format_scalar(b.value) for b in d.blocks]}
                        for s, d in zip(lat.model.summands, lat.deligne)],
           "stability": rep.to_json()}
    return res, EXIT_OK if rep.stable else EXIT_FALSIFIER


def run_decompose(cf: ConnectionFile, a: Optional[int] = None, point: Optional[str] = None) -> Tuple[dict, int]:
    _need(cf, "constant_system", "elementary", "presentation")
    if cf.kind == "constant_system":
        ok, pair = check_commuting(cf.model)
        if not ok:
            raise NotCommuting(f"matrices {pair[0]} and {pair[1]} do not commute")
        mod = joint_spectrum_decompose(cf.model)
        return {"module": mod.to_json()}, EXIT_OK
    if cf.kind == "elementary":
        a = _default_a(cf, a)
        pres = synthesize_Ha(cf.model, a, point=_point(cf, point))
        return {"a": a, **extract_restriction(pres).to_json()}, EXIT_OK
    return extract_restriction(cf.model).to_json(), EXIT_OK


# -- corpus -------------------------------------------------------------------

def _step(fn, *args) -> Tuple[dict, int]:
    try:
        return fn(*args)
    except AsdError as e:
        return error_json(e), exit_code_for(e)


def corpus_entry(path: str) -> Tuple[dict, int]:
    name = Path(path).name
    try:
        cf = load(path)
    except AsdError as e:
        return {"file": name, **error_json(e)}, exit_code_for(e)
    steps: Dict[str, Tuple[dict, int]] = {}
    if cf.kind in ("elementary", "matrix"):
        steps["katz"] = _step(run_katz, cf)
    if cf.kind == "elementary":
        steps["specialize"] = _step(run_specialize, cf, None, None, None)
        steps["lattice"] = _step(run_lattice, cf)
        steps["check-l"] = _step(run_check_l, cf, None, None)
        steps["decompose"] = _step(run_decompose, cf)
        if cf.n == 1:
            steps["psi"] = _step(run_psi, cf)
    elif cf.kind == "onevar":
        steps["psi"] = _step(run_psi, cf)
    elif cf.kind == "constant_system":
        steps["decompose"] = _step(run_decompose, cf)
    elif cf.kind == "presentation":
        steps["check-l"] = _step(run_check_l, cf, None, None)
    worst = EXIT_FALSIFIER if any(c == EXIT_FALSIFIER for _, c in steps.values()) else EXIT_OK
    return {"file": name, "input": serialize(cf),
            "results": {k: {"exit_code": c, **r} for k, (r, c) in steps.items()}}, worst


def run_corpus(directory: str, jobs: int = 1) -> Tuple[dict, int]:
    root = Path(directory)
    if not root.is_dir():
        raise UsageError(f"{directory} is not a directory")
    files = sorted(str(p) for p in root.glob("*.json"))
    if jobs > 1 and len(files) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(corpus_entry, files))
    else:
        results = [corpus_entry(f) for f in files]
    code = EXIT_FALSIFIER if any(c == EXIT_FALSIFIER for _, c in results) else EXIT_OK
    return {"corpus": root.name, "count": len(files), "entries": [r for r, _ in results]}, code


# -- human-readable rendering ---------------------------------------------------

def render(command: str, res: dict) -> str:
    lines: List[str] = []
    if command == "katz":
        lines.append(f"Katz rank: {res['rho']} ({res['method']})")
    elif command == "specialize":
        lines.append(f"a = {res['a']}, point = ({', '.join(res['point'])}), rho = {res['rho']}, "
                     f"truncation = {res['truncation']['order']} ({res['truncation']['source']})")
        for f in res["forms"]:
            lines.append(f"  form {f['form']}  multiplicity {f['multiplicity']}")
        for p in res["pairs"]:
            if p["status"] != "linear":
                lines.append(f"  pair {tuple(p['pair'])}: {p['status']} ({p.get('witness', '')})")
    elif command == "check-l":
        L, P = res["property_L"], res["property_P"]
        lines.append(f"property L: {'holds' if L['holds'] else 'fails'} (window {L['window']}, "
                     f"{L['coefficients_checked']} coefficients)")
        if L["witness"]:
            w = L["witness"]
            lines.append(f"  witness: coefficient {tuple(w['coefficient'])}, {w['part']}, nu={w['nu']}, "
                         f"monomial {w['monomial']}")
        lines.append(f"property P: {'holds' if P['holds'] else 'fails'}")
    elif command == "psi":
        if not res["psi"]:
            lines.append("Psi = 0")
        for p in res["psi"]:
            lines.append(f"Gr_{p['a']}: dimension {p['dimension']}, basis {', '.join(p['basis'])}, "
                         f"t d_t = {p['tdt_action']}")
        for b in res["bernstein"]:
            lines.append(f"b({b['section']}) = {b['b']}")
        r = res["restriction"]
        lines.append(f"restriction: H^-1 = {r['H^-1']}, H^0 = {r['H^0']}")
    elif command == "lattice":
        lines.append(f"tau strip [{res['tau_strip'][0]}, {res['tau_strip'][1]}), rho = {res['rho']}")
        lines.append("basis: " + ", ".join(res["basis"]))
        st = res["stability"]
        lines.append(f"stable under x_n^rho d_i and x_n^(rho+1) d_n: {'yes' if st['stable'] else 'no'}; "
                     f"k0 = {st['k0']}")
    elif command == "decompose":
        mod = res.get("module", {})
        for f in mod.get("forms", []):
            lines.append(f"{f['form']}  multiplicity {f['multiplicity']}")
    return "\n".join(lines) + "\n"


# -- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="asd", description="Exact specialization of meromorphic connections.")
    p.add_argument("--version", action="version", version=f"asd {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, help_):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--json", action="store_true", help="machine-readable output")
        return s

    s = cmd("katz", "generic Poincare-Katz rank")
    s.add_argument("file")
    s = cmd("specialize", "fiberwise linear forms of H_a at a point")
    s.add_argument("--a", type=int, required=True)
    s.add_argument("--point", required=True, help="divisor coordinates, e.g. x1=1")
    s.add_argument("--truncation", type=int)
    s.add_argument("file")
    s = cmd("check-l", "property L and P of the synthesized presentation")
    s.add_argument("--a", type=int)
    s.add_argument("--point")
    s.add_argument("--allow-unstable", action="store_true")
    s.add_argument("--window", type=int)
    s.add_argument("file")
    s = cmd("psi", "nearby cycles of a one-variable module")
    s.add_argument("file")
    s = cmd("lattice", "Malgrange lattice and its stability")
    s.add_argument("--tau-strip", default="0", help="lower end of the strip [lo, lo+1)")
    s.add_argument("file")
    s = cmd("decompose", "joint spectrum of commuting constant matrices")
    s.add_argument("--a", type=int)
    s.add_argument("--point")
    s.add_argument("file")
    s = sub.add_parser("corpus", help="run every pipeline on a directory of files")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("dir")
    return p


def _glue_values(argv: Sequence[str]) -> List[str]:
    """Let ``--tau-strip -1/2`` and ``--point -1`` through argparse."""
    out, it = [], iter(argv)
    for tok in it:
        if tok in ("--tau-strip", "--point"):
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        return _main(sys.argv[1:] if argv is None else argv)
    except BrokenPipeError:  # output piped into e.g. head
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK


def _main(argv: Sequence[str]) -> int:
    try:
        args = build_parser().parse_args(_glue_values(argv))
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        if args.command == "corpus":
            if args.jobs < 1:
                raise UsageError("--jobs must be positive")
            res, code = run_corpus(args.dir, args.jobs)
            sys.stdout.write(dumps(res))
            return code
        cf = load(args.file)
        if args.command == "katz":
            res, code = run_katz(cf)
        elif args.command == "specialize":
            if args.truncation is not None and args.truncation < 1:
                raise UsageError("--truncation must be positive")
            res, code = run_specialize(cf, args.a, args.point, args.truncation)
        elif args.command == "check-l":
            res, code = run_check_l(cf, args.a, args.point, args.allow_unstable, args.window)
        elif args.command == "psi":
            res, code = run_psi(cf)
        elif args.command == "lattice":
            res, code = run_lattice(cf, parse_scalar(args.tau_strip))
        else:
            res, code = run_decompose(cf, args.a, args.point)
    except AsdError as e:
        sys.stderr.write(f"asd: {type(e).__name__}: {e}\n")
        if getattr(args, "json", False):
            sys.stdout.write(dumps({"command": args.command, **error_json(e)}))
        return exit_code_for(e)
    if args.json:
        sys.stdout.write(dumps({"command": args.command, "input": serialize(cf), "results": res}))
    else:
        sys.stdout.write(render(args.command, res))
    return code


if __name__ == "__main__":
    sys.exit(main())
