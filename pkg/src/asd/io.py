"""Reading and writing connection descriptions (JSON, schema ``asd-connection/1``)."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from json.decoder import scanstring
from typing import Any, Dict, List, Optional, Tuple

import jsonschema

from .algebra import Matrix, parse_fraction, parse_scalar
from .algebra.mpoly import format_scalar
from .connection import ElementaryModel, MatrixConnection, RegularPart, Summand, coords
from .errors import AsdError, ParseError, UsageError
from .linear import ConstantSystem
from .properties import Presentation
from .vfiltration import Component, OneVarModule, Section

SCHEMA_ID = "asd-connection/1"


def load_schema() -> dict:
    return json.loads(resources.files("asd").joinpath("data/connection.schema.json").read_text("utf-8"))


# -- source positions ---------------------------------------------------------

_NUMBER = re.compile(r"-?(?:0|[1-9]\d*)(?:\.\d+)?(?:[eE][-+]?\d+)?")
_WS = re.compile(r"\s*")


def _positions(text: str) -> Dict[Tuple, int]:
    """Offset of every JSON value, keyed by its path."""
    out: Dict[Tuple, int] = {}

    def ws(i):
        return _WS.match(text, i).end()

    def value(i, path):
        i = ws(i)
        out[path] = i
        ch = text[i:i + 1]
        if ch == "{":
            i = ws(i + 1)
            if text[i] == "}":
                return i + 1
            while True:
                key, i = scanstring(text, ws(i) + 1)
                i = ws(i) + 1          # ':'
                i = ws(value(i, path + (key,)))
                if text[i] == "}":
                    return i + 1
                i += 1
        if ch == "[":
            i = ws(i + 1)
            if text[i] == "]":
                return i + 1
            k = 0
            while True:
                i = ws(value(i, path + (k,)))
                k += 1
                if text[i] == "]":
                    return i + 1
                i += 1
        if ch == '"':
            return scanstring(text, i + 1)[1]
        for lit in ("true", "false", "null"):
            if text.startswith(lit, i):
                return i + len(lit)
        return _NUMBER.match(text, i).end()

    try:
        value(0, ())
    except Exception:  # positions are best effort; json.loads reports syntax errors
        pass
    return out


def _line_col(text: str, offset: int) -> Tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    return line, offset - (text.rfind("\n", 0, offset) + 1) + 1


class InputError(ParseError):
    def __init__(self, message, path=(), text=None, positions=None):
        self.path = tuple(path)
        line = col = None
        if text is not None:
            positions = positions if positions is not None else _positions(text)
            p = self.path
            while p not in positions and p:
                p = p[:-1]
            if p in positions:
                line, col = _line_col(text, positions[p])
        where = "$" + "".join(f"[{k}]" if isinstance(k, int) else f".{k}" for k in self.path)
        super().__init__(f"{where}: {message}", line, col)


# -- the file object ----------------------------------------------------------

@dataclass
class ConnectionFile:
    kind: str
    model: Any
    n: Optional[int] = None
    name: str = ""
    a: Optional[int] = None
    point: Optional[Tuple[Fraction, ...]] = None
    sections: Tuple[Section, ...] = ()
    lattice: Optional[Tuple[int, ...]] = None

    def __eq__(self, other):
        return isinstance(other, ConnectionFile) and serialize(self) == serialize(other)


def _rational(v, path, ctx):
    try:
        return parse_scalar(v)
    except AsdError as e:
        raise InputError(str(e), path, *ctx) from None


def _square(rows, path, ctx) -> Matrix:
    if len({len(r) for r in rows}) != 1 or len(rows) != len(rows[0]):
        raise InputError("matrix must be square", path, *ctx)
    return Matrix(tuple(tuple(_rational(v, path + (i, j), ctx) for j, v in enumerate(r))
                        for i, r in enumerate(rows)))


def _expr(v, var, allowed, path, ctx):
    try:
        f = parse_fraction(v, var)
    except AsdError as e:
        raise InputError(str(e), path, *ctx) from None
    extra = set(f.variables()) - set(allowed)
    if extra:
        raise InputError(f"unknown variables {sorted(extra)} (allowed: {', '.join(allowed)})", path, *ctx)
    return f


def parse_text(text: str, source: str = "<input>") -> ConnectionFile:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{source}: invalid JSON: {e.msg}", e.lineno, e.colno) from None
    positions = _positions(text)
    ctx = (text, positions)
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(raw), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = max(errors, key=lambda e: len(e.absolute_path))
        raise InputError(f"schema: {err.message}", tuple(err.absolute_path), *ctx)
    return _build(raw, ctx)


def parse_data(raw: dict) -> ConnectionFile:
    text = json.dumps(raw, indent=2)
    return parse_text(text)


def _build(raw: dict, ctx) -> ConnectionFile:
    kind, model, n = raw["kind"], raw["model"], raw.get("n")
    cf = ConnectionFile(kind, None, n, raw.get("name", ""), raw.get("a"))
    if "point" in raw:
        if n is None:
            raise InputError("a point needs n", ("point",), *ctx)
        names = coords(n)[:-1]
        pt = raw["point"]
        bad = sorted(set(pt) - set(names))
        if bad:
            raise InputError(f"point coordinates must be among {list(names)}", ("point", bad[0]), *ctx)
        cf.point = tuple(_rational(pt.get(x, "0"), ("point", x), ctx) for x in names)
    try:
        if kind == "elementary":
            xs = coords(n)
            summands = []
            for k, s in enumerate(model["summands"]):
                phi = _expr(s["phi"], xs[-1], xs, ("model", "summands", k, "phi"), ctx)
                if "residue" in s:
                    reg = RegularPart(_square(s["residue"], ("model", "summands", k, "residue"), ctx))
                    if "rank" in s and s["rank"] != reg.rank:
                        raise InputError("rank disagrees with residue size", ("model", "summands", k, "rank"), *ctx)
                else:
                    reg = RegularPart.trivial(s.get("rank", 1))
                summands.append(Summand(phi, reg))
            cf.model = ElementaryModel(n, tuple(summands))
        elif kind == "matrix":
            xs = coords(n)
            if len(model["A"]) != n:
                raise InputError(f"need {n} matrices", ("model", "A"), *ctx)
            mats = []
            for i, rows in enumerate(model["A"]):
                if len({len(r) for r in rows}) != 1 or len(rows) != len(rows[0]):
                    raise InputError("matrix must be square", ("model", "A", i), *ctx)
                mats.append(Matrix(tuple(tuple(_expr(v, xs[-1], xs, ("model", "A", i, r, c), ctx)
                                               for c, v in enumerate(row)) for r, row in enumerate(rows))))
            cf.model = MatrixConnection(n, tuple(mats))
        elif kind == "presentation":
            ts = tuple(f"t{i}" for i in range(1, n + 1))
            ys = tuple(f"y{i}" for i in range(1, n + 1))
            rel = {}
            for k, r in enumerate(model["relations"]):
                key = (r["i"], r["j"], r["u"])
                if key in rel:
                    raise InputError("duplicate relation", ("model", "relations", k), *ctx)
                rel[key] = _expr(r["coefficient"], ts[-1], ts + ys, ("model", "relations", k, "coefficient"), ctx)
            deps = tuple(tuple(_rational(v, ("model", "dependencies", k, j), ctx) for j, v in enumerate(d))
                         for k, d in enumerate(model.get("dependencies", [])))
            cf.model = Presentation(ts, ys, tuple(model["generators"]), rel, deps)
        elif kind == "onevar":
            comps = []
            for k, c in enumerate(model["components"]):
                path = ("model", "components", k)
                if c["type"] == "structure":
                    comps.append(Component.structure())
                    continue
                res = _square(c["residue"], path + ("residue",), ctx) if "residue" in c else Matrix.of([[0]])
                if c["type"] == "regular":
                    comps.append(Component("regular", res))
                else:
                    if "c" not in c:
                        raise InputError("exponential components need c", path, *ctx)
                    comps.append(Component("exponential", res, _rational(c["c"], path + ("c",), ctx), c.get("r", 1)))
            cf.model = OneVarModule(tuple(comps))
            if "lattice" in model:
                cf.lattice = tuple(model["lattice"])
            secs = []
            for k, s in enumerate(model.get("sections", [])):
                sec: Section = {}
                for term in s:
                    key = (term["power"], term["basis"] - 1)
                    sec[key] = sec.get(key, 0) + Fraction(_rational(term["coefficient"], ("model", "sections", k), ctx))
                secs.append(cf.model.check_section(sec))
            cf.sections = tuple(secs)
        elif kind == "constant_system":
            cf.model = ConstantSystem(tuple(_square(m, ("model", "matrices", k), ctx)
                                            for k, m in enumerate(model["matrices"])))
    except (ValueError, AsdError) as e:
        if isinstance(e, UsageError):
            raise
        raise InputError(str(e), ("model",), *ctx) from None
    return cf


def load(path) -> ConnectionFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    return parse_text(text, str(path))


# -- serialization ------------------------------------------------------------

def _mat(m: Matrix) -> List[List[str]]:
    return [[str(x) if not isinstance(x, Fraction) else format_scalar(x) for x in row] for row in m.rows]


def serialize(cf: ConnectionFile) -> dict:
    out: Dict[str, Any] = {"schema": SCHEMA_ID, "kind": cf.kind}
    if cf.name:
        out["name"] = cf.name
    if cf.n is not None:
        out["n"] = cf.n
    if cf.a is not None:
        out["a"] = cf.a
    if cf.point is not None:
        out["point"] = {x: format_scalar(c) for x, c in zip(coords(cf.n), cf.point)}
    m = cf.model
    if cf.kind == "elementary":
        out["model"] = {"summands": [{"phi": str(s.phi.normalized()), "residue": _mat(s.reg.residue)}
                                     for s in m.summands]}
    elif cf.kind == "matrix":
        out["model"] = {"A": [[[str(x.normalized()) for x in row] for row in a.rows] for a in m.A]}
    elif cf.kind == "presentation":
        model = {"generators": list(m.generators),
                 "relations": [{"i": i, "j": j, "u": u, "coefficient": str(f)}
                               for (i, j, u), f in sorted(m.relations.items())]}
        if m.dependencies:
            model["dependencies"] = [[format_scalar(c) for c in d] for d in m.dependencies]
        out["model"] = model
    elif cf.kind == "onevar":
        comps = []
        for c in m.components:
            d: Dict[str, Any] = {"type": c.kind}
            if c.kind != "structure":
                d["residue"] = _mat(c.residue)
            if c.kind == "exponential":
                d["c"] = format_scalar(c.c)
                d["r"] = c.r
            comps.append(d)
        model = {"components": comps}
        if cf.lattice is not None:
            model["lattice"] = list(cf.lattice)
        if cf.sections:
            model["sections"] = [[{"power": p, "basis": g + 1, "coefficient": format_scalar(v)}
                                  for (p, g), v in sorted(s.items(), key=lambda kv: (kv[0][1], kv[0][0]))]
                                 for s in cf.sections]
        out["model"] = model
    elif cf.kind == "constant_system":
        out["model"] = {"matrices": [_mat(a) for a in m.matrices]}
    return out


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
