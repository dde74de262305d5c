"""Regenerate the shipped corpus under src/asd/data/corpus."""
import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "asd" / "data" / "corpus"

# (name, n, summands, point, a); a summand is (phi, residue or rank)
ELEMENTARY = [
    ("e01_inv_x2", 2, [("1/x2", 1)], {"x1": "0"}, 1),
    ("e02_x1_over_x2sq", 2, [("x1/x2^2", 1)], {"x1": "1"}, 2),
    ("e03_quadratic_pole1", 2, [("(x1^2 + 1)/x2", 1)], {"x1": "2"}, 1),
    ("e04_cubic_pole3", 2, [("(x1^3 - x1 + 2)/x2^3", 1)], {"x1": "1"}, 3),
    ("e05_linear_residue_half", 2, [("(2*x1 + 3)/x2^2", [["1/2"]])], {"x1": "0"}, 2),
    ("e06_mixed_xn", 2, [("(x1^2 + x1*x2 + 1)/x2^2", 1)], {"x1": "-1"}, 2),
    ("e07_lower_order_terms", 2, [("(1 + x2^2)/x2^3", 1)], {"x1": "0"}, 3),
    ("e08_rank2_trivial", 2, [("-3/x2", 2)], {"x1": "5"}, 1),
    ("e09_jordan_residue", 2, [("(x1 + 1)/x2", [["0", "1"], ["0", "0"]])], {"x1": "1"}, 1),
    ("e10_diag_residue", 2, [("(x1^2 - 2)/x2^2", [["1/3", "0"], ["0", "5/2"]])], {"x1": "1"}, 2),
    ("e11_three_vars_pole1", 3, [("(x1 + x2)/x3", 1)], {"x1": "1", "x2": "1"}, 1),
    ("e12_three_vars_pole2", 3, [("(x1*x2 + 1)/x3^2", 1)], {"x1": "1", "x2": "2"}, 2),
    ("e13_three_vars_pole3", 3, [("(x1^2 + x2^3 + x3)/x3^3", 1)], {"x1": "1", "x2": "1"}, 3),
    ("e14_three_vars_residue", 3, [("(x1 - 2*x2 + 3)/x3^2", [["-1/2"]])], {"x1": "0", "x2": "0"}, 2),
    ("e15_cubic_pole1", 3, [("(x1^3 + 1)/x3", 1)], {"x1": "1", "x2": "0"}, 1),
    ("e16_rank2_pole3", 3, [("(x2^2 + x1*x3 + 5)/x3^3", 2)], {"x1": "0", "x2": "1"}, 3),
    ("e17_one_var_pole1", 1, [("1/x1", 1)], None, 1),
    ("e18_one_var_pole2", 1, [("2/x1^2", 1)], None, 2),
    ("e19_cubic_with_xn", 2, [("(x1^3 + x1*x2^2 + 4)/x2^3", 1)], {"x1": "1"}, 3),
    ("e20_three_vars_diag_residue", 3, [("(2*x1*x2 - x2 + 1)/x3", [["1", "0"], ["0", "-1/2"]])],
     {"x1": "1", "x2": "1"}, 1),
    ("e21_negative_leading", 2, [("(5 - x1)/x2^2", 1)], {"x1": "1"}, 2),
    ("e22_three_vars_mixed", 3, [("(x1^2*x2 + 7)/x3^2", 1)], {"x1": "1", "x2": "-1"}, 2),
    ("e23_two_exponentials", 2, [("1/x2", 1), ("2/x2", 1)], {"x1": "0"}, 1),
    ("e24_two_summands_three_vars", 3, [("x1/x3^2", 1), ("(2*x1 + x2)/x3^2", 1)], {"x1": "1", "x2": "1"}, 2),
    ("e25_turning_pair", 2, [("x1/x2", 1), ("-x1/x2", 1)], {"x1": "1"}, 1),
    ("e26_regular_residue", 2, [("0", [["5/2"]])], {"x1": "0"}, None),
]

OTHERS = [
    ("m01_rank1_potential", {"kind": "matrix", "n": 2,
                             "model": {"A": [[["1/x2^2"]], [["-2*x1/x2^3"]]]}}),
    ("m02_ramified_slope", {"kind": "matrix", "n": 1,
                            "model": {"A": [[["0", "1"], ["1/x1^3", "0"]]]}}),
    ("v01_laurent", {"kind": "onevar", "model": {
        "components": [{"type": "regular", "residue": [["0"]]}], "lattice": [0],
        "sections": [[{"power": 0, "basis": 1, "coefficient": "1"}],
                     [{"power": -1, "basis": 1, "coefficient": "1"}]]}}),
    ("v02_exponential", {"kind": "onevar", "model": {
        "components": [{"type": "exponential", "c": "1", "r": 1}],
        "sections": [[{"power": 0, "basis": 1, "coefficient": "1"}]]}}),
    ("v03_structure_sheaf", {"kind": "onevar", "model": {"components": [{"type": "structure"}]}}),
    ("v04_half_twist", {"kind": "onevar", "model": {
        "components": [{"type": "regular", "residue": [["1/2"]]}], "lattice": [0]}}),
    ("v05_jordan", {"kind": "onevar", "model": {
        "components": [{"type": "regular", "residue": [["0", "1"], ["0", "0"]]}], "lattice": [0, 0]}}),
    ("c01_diag_pair", {"kind": "constant_system", "model": {
        "matrices": [[["1", "0"], ["0", "2"]], [["3", "0"], ["0", "4"]]]}}),
    ("c02_nilpotent", {"kind": "constant_system", "model": {"matrices": [[["0", "1"], ["0", "0"]]]}}),
    ("c03_conjugate_pair", {"kind": "constant_system", "model": {"matrices": [[["0", "-1"], ["1", "0"]]]}}),
]


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for old in OUT.glob("*.json"):
        old.unlink()
    for name, n, summands, point, a in ELEMENTARY:
        items = []
        for phi, reg in summands:
            d = {"phi": phi}
            if isinstance(reg, int):
                if reg != 1:
                    d["rank"] = reg
            else:
                d["residue"] = reg
            items.append(d)
        doc = {"schema": "asd-connection/1", "name": name, "kind": "elementary", "n": n,
               "model": {"summands": items}}
        if point:
            doc["point"] = point
        if a:
            doc["a"] = a
        (OUT / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")
    for name, body in OTHERS:
        doc = {"schema": "asd-connection/1", "name": name, **body}
        (OUT / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")


if __name__ == "__main__":
    main()
