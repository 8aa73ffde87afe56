#!/usr/bin/env python3
"""Generates tests/support/manufactured.hpp.

Constructs a divergence-free velocity / pressure pair on the physical domain
bounded below by a control graph, verifies symbolically that it satisfies the
problem's boundary conditions, and emits the exact fields, their gradients,
and the matching body force and boundary data as inline C++ functions.

Two cases are emitted: the unit square (flat control) and the parabolic
preset control 0.2 (1 - 4 (x - 1/2)^2), which the degree-4 control space
represents exactly.

Usage: gen_manufactured.py [output-path]
"""

import sys

import sympy as sp

x, y, eta, nu = sp.symbols("x y eta nu", real=True)


def build_case(q):
    """Velocity from a stream function psi = w(x) g(d) with d the relative
    height (y - q)/(1 - q); g has a double zero at the wall (no slip) and
    g' , g'' vanish at d = 1 (symmetry side)."""
    w = 1 + x**2
    d = (y - q) / (1 - q)
    t = sp.symbols("_t")
    g = (t**2 * (1 - t) ** 3).subs(t, d)
    psi = w * g
    ux = sp.diff(psi, y)
    uy = -sp.diff(psi, x)
    # Amplitude keeps the pressure's own interpolation error dominant over
    # the velocity-coupling contribution, so the fitted order is clean on
    # coarse meshes as well.
    p = 3 * sp.cos(sp.pi * x) * sp.cos(sp.pi * y)
    return ux, uy, p


def verify_case(name, q, ux, uy, p):
    checks = []
    checks.append(("divergence free", sp.simplify(sp.diff(ux, x) + sp.diff(uy, y)) == 0))
    wall_ux = sp.simplify(ux.subs(y, q))
    wall_uy = sp.simplify(uy.subs(y, q))
    checks.append(("no slip on the wall", wall_ux == 0 and wall_uy == 0))
    checks.append(("u_y = 0 on the top side", sp.simplify(uy.subs(y, 1)) == 0))
    checks.append(
        ("traction-free tangential top", sp.simplify(sp.diff(ux, y).subs(y, 1)) == 0)
    )
    # The inflow side is fixed by the map (q(0) = 0), so the horizontal trace
    # is g'(y) for every case; the vertical trace is forced by the wall slope
    # at the corner.
    t = sp.symbols("_t")
    g = t**2 * (1 - t) ** 3
    gp = sp.diff(g, t).subs(t, y)
    dq0 = sp.diff(q, x).subs(x, 0) if q != 0 else sp.Integer(0)
    checks.append(
        ("inflow horizontal trace is g'(y)", sp.simplify(ux.subs(x, 0) - gp) == 0)
    )
    checks.append(
        (
            "inflow vertical trace is q'(0) g'(y) (1-y)",
            sp.simplify(uy.subs(x, 0) - dq0 * gp * (1 - y)) == 0,
        )
    )
    if q != 0:
        checks.append(("control endpoint values", q.subs(x, 0) == 0 and q.subs(x, 1) == 0))
    ok = True
    for label, passed in checks:
        print(f"[{name}] {label}: {'ok' if passed else 'FAILED'}", file=sys.stderr)
        ok &= passed
    if not ok:
        raise SystemExit(f"symbolic verification failed for case {name}")


def emit_fn(out, name, args, expr):
    body = sp.ccode(sp.simplify(expr))
    arglist = ", ".join(f"double {a}" for a in args)
    out.append(f"inline double {name}({arglist}) {{ return {body}; }}")


def emit_case(out, name, q, ux, uy, p):
    out.append(f"namespace {name} {{")
    emit_fn(out, "ux", ["x", "y"], ux)
    emit_fn(out, "uy", ["x", "y"], uy)
    emit_fn(out, "p", ["x", "y"], p)
    emit_fn(out, "dux_dx", ["x", "y"], sp.diff(ux, x))
    emit_fn(out, "dux_dy", ["x", "y"], sp.diff(ux, y))
    emit_fn(out, "duy_dx", ["x", "y"], sp.diff(uy, x))
    emit_fn(out, "duy_dy", ["x", "y"], sp.diff(uy, y))
    lap_ux = sp.diff(ux, x, 2) + sp.diff(ux, y, 2)
    lap_uy = sp.diff(uy, x, 2) + sp.diff(uy, y, 2)
    emit_fn(out, "fx", ["x", "y", "eta", "nu"], eta * ux - nu * lap_ux + sp.diff(p, x))
    emit_fn(out, "fy", ["x", "y", "eta", "nu"], eta * uy - nu * lap_uy + sp.diff(p, y))
    # Outflow traction nu du/dx - p n at x = 1 (the map is the identity there).
    emit_fn(out, "gn_x", ["y", "nu"], (nu * sp.diff(ux, x) - p).subs(x, 1))
    emit_fn(out, "gn_y", ["y", "nu"], (nu * sp.diff(uy, x)).subs(x, 1))
    # Inflow Dirichlet trace at x = 0 (the map is the identity there too).
    emit_fn(out, "gd_x", ["y"], ux.subs(x, 0))
    emit_fn(out, "gd_y", ["y"], uy.subs(x, 0))
    if q != 0:
        emit_fn(out, "q", ["x"], q)
        emit_fn(out, "dq", ["x"], sp.diff(q, x))
    out.append(f"}}  // namespace {name}")
    out.append("")


def main():
    path = sys.argv[1] if len(sys.argv) > 1 else "tests/support/manufactured.hpp"

    q_par = sp.Rational(1, 5) * (1 - 4 * (x - sp.Rational(1, 2)) ** 2)

    cases = []
    for name, q in [("flat", sp.Integer(0)), ("parabolic", q_par)]:
        ux, uy, p = build_case(q)
        verify_case(name, q, ux, uy, p)
        cases.append((name, q, ux, uy, p))

    out = [
        "// Generated by scripts/gen_manufactured.py; do not edit by hand.",
        "//",
        "// Exact Stokes fields on the physical domain: a divergence-free",
        "// velocity with no slip on the control graph, a symmetry-compatible",
        "// top trace, and the body force and boundary data that make",
        "// (u, p) solve  eta u - div(nu grad u) + grad p = f  for constant",
        "// eta, nu.  All functions take physical coordinates; gd_* and gn_*",
        "// are the inflow Dirichlet and outflow traction traces (both sides",
        "// are fixed by the map, so they can be consumed directly).",
        "#pragma once",
        "",
        "#include <cmath>",
        "",
        "namespace mms {",
        "",
    ]

    for name, q, ux, uy, p in cases:
        emit_case(out, name, q, ux, uy, p)

    out.append("}  // namespace mms")
    out.append("")

    with open(path, "w") as f:
        f.write("\n".join(out))
    print(f"wrote {path}", file=sys.stderr)


if __name__ == "__main__":
    main()
