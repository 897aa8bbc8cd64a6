#!/usr/bin/env python3
"""Regenerate reference.json: known critical points for n = 2 and n = 3.

Every closed form is checked symbolically against the Lagrange system
(x_i dS/dx_i = 2, dS/du_ij = 0) before it is written, then evaluated to
30 significant digits and rounded once to a double.

    python3 generate_reference.py > reference.json
"""
import json
import sys

import sympy as sp

DIGITS = 30


def s_tilde_2(x, y, u):
    return x**2 + y**2 - (u**2 * x - u * y) ** 2


def s_tilde_3(x, y, z, u, v, w):
    return (
        x**2 + y**2 + z**2
        - u**2 * (u * x - y) ** 2
        - 2 * u**2 * (v * x - w * y) ** 2
        - w**2 * (w * y - z) ** 2
        - (v**2 * x - w**2 * u * y + (w * u - v) * z) ** 2
    )


N2 = [
    ("1", ["1", "1"], ["0"]),
    ("2", ["1", "1"], ["1"]),
    ("3", ["sqrt(2)/2", "sqrt(2)"], ["1"]),
    ("4", ["3/sqrt(10)", "sqrt(6/5)"], ["sqrt(3)/3"]),
]

# (row, x, y, z, u, v, w)
N3 = [
    (1, "1", "1", "1", "0", "0", "0"),
    (2, "1", "1", "1", "1", "0", "0"),
    (3, "1", "1", "1", "0", "1", "0"),
    (4, "1", "1", "1", "0", "0", "1"),
    (5, "1", "1", "1", "0", "1", "1"),
    (6, "1", "1", "1", "1", "1", "1"),
    (7, "1", "1/sqrt(2)", "sqrt(2)", "0", "0", "1"),
    (8, "1", "1/sqrt(2)", "sqrt(2)", "0", "sqrt(2)", "1"),
    (9, "1", "1/sqrt(2)", "sqrt(2)", "1/sqrt(2)", "1/sqrt(2)", "1"),
    (10, "1/sqrt(3)", "sqrt(3/2)", "sqrt(2)", "1/sqrt(2)", "sqrt(3/2)", "1/sqrt(3)"),
    (11, "1/sqrt(2)", "1", "sqrt(2)", "0", "1", "0"),
    (12, "1/sqrt(2)", "1", "sqrt(2)", "0", "1", "sqrt(2)"),
    (13, "1/sqrt(2)", "sqrt(2)", "1", "1", "0", "0"),
    (14, "1/sqrt(2)", "sqrt(2)", "1", "1", "sqrt(2)", "1/sqrt(2)"),
    (15, "1/sqrt(2)", "sqrt(2/3)", "sqrt(3)", "1/sqrt(3)", "2*sqrt(6)/3", "1/sqrt(2)"),
    (16, "1/sqrt(2)", "sqrt(2/3)", "sqrt(3)", "1/sqrt(3)", "sqrt(2/3)", "sqrt(2)"),
    (17, "2*sqrt(2)/3", "1", "2/sqrt(3)", "1/(2*sqrt(2))", "sqrt(6)/4", "1/sqrt(3)"),
    (18, "1", "3/sqrt(10)", "sqrt(6/5)", "0", "0", "1/sqrt(3)"),
    (19, "1", "3/sqrt(10)", "sqrt(6/5)", "0", "sqrt(6/5)", "1/sqrt(3)"),
    (20, "1", "3/sqrt(10)", "sqrt(6/5)", "3/sqrt(10)", "sqrt(3/10)", "1/sqrt(3)"),
    (21, "3/sqrt(19)", "sqrt(19/10)", "sqrt(6/5)", "3/sqrt(10)", "sqrt(19/30)", "sqrt(3/19)"),
    (22, "3/sqrt(19)", "sqrt(57/55)", "sqrt(11/5)", "sqrt(5/33)", "2*sqrt(19/55)", "sqrt(3/19)"),
    (23, "3/sqrt(19)", "sqrt(57/55)", "sqrt(11/5)", "sqrt(5/33)", "sqrt(95/11)/3", "8/sqrt(57)"),
    (24, "3/sqrt(10)", "1", "sqrt(6/5)", "0", "1/sqrt(3)", "0"),
    (25, "3/sqrt(10)", "1", "sqrt(6/5)", "0", "1/sqrt(3)", "sqrt(6/5)"),
    (26, "3/sqrt(10)", "sqrt(6/11)", "sqrt(11/5)", "sqrt(5/33)", "8*sqrt(22)/33", "sqrt(5/6)"),
    (27, "3/sqrt(10)", "sqrt(6/11)", "sqrt(11/5)", "sqrt(5/33)", "sqrt(2/11)", "sqrt(6/5)"),
    (28, "3/sqrt(10)", "sqrt(6/5)", "1", "1/sqrt(3)", "0", "0"),
    (29, "3/sqrt(10)", "sqrt(6/5)", "1", "1/sqrt(3)", "sqrt(10)/3", "sqrt(5/6)"),
]


def check_critical(expr, xs, us, values):
    subs = dict(zip(xs + us, values))
    for xi in xs:
        r = sp.simplify(sp.nsimplify((sp.diff(expr, xi) * xi - 2).subs(subs)))
        assert r == 0, (values, xi, r)
    for ui in us:
        r = sp.simplify((sp.diff(expr, ui)).subs(subs))
        assert r == 0, (values, ui, r)


def to_double(e):
    return float(sp.N(e, DIGITS))


def point(label, x_exact, u_exact):
    xs = [sp.sympify(s) for s in x_exact]
    us = [sp.sympify(s) for s in u_exact]
    vol = sp.nsimplify(sp.simplify(sp.prod(xs)))
    return {
        "label": label,
        "x_exact": x_exact,
        "u_exact": u_exact,
        "x": [to_double(e) for e in xs],
        "u": [to_double(e) for e in us],
        "volume_exact": str(vol),
        "volume": to_double(vol),
    }


def main():
    x, y, z, u, v, w = sp.symbols("x y z u v w")
    s2 = s_tilde_2(x, y, u)
    s3 = s_tilde_3(x, y, z, u, v, w)

    pts2 = []
    for label, xe, ue in N2:
        check_critical(s2, [x, y], [u], [sp.sympify(e) for e in xe + ue])
        pts2.append(point(label, xe, ue))

    pts3 = []
    for row, *vals in N3:
        check_critical(s3, [x, y, z], [u, v, w], [sp.sympify(e) for e in vals])
        pts3.append(point(str(row), list(vals[:3]), list(vals[3:])))

    doc = {
        "version": 1,
        "convention": "stilde-n",
        "digits": DIGITS,
        "sets": [
            {"n": 2, "points": pts2},
            {"n": 3, "points": pts3},
        ],
    }
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
