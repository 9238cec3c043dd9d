"""Generate src/tdwavebem/_closed_forms.py.

The retarded single-layer element integral over a sub-triangle reduces to
a 1D antiderivative F_d(x; y, z, s) evaluated at (possibly wavefront-
clipped) limits, with dF_d/dx = (s-r)^{d+1}/(d+1) * y/(x^2+y^2),
r = sqrt(x^2+y^2+z^2).  The double-layer and Burton-Miller coefficients
need the parameter derivatives of F_d; they are derived here symbolically,
verified by differentiation, and emitted as vectorised numpy code.

Run:  python tools/gen_closed_forms.py
"""
from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import sympy as sp
from sympy.printing.numpy import NumPyPrinter

OUT = Path(__file__).resolve().parent.parent / "src" / "tdwavebem" / "_closed_forms.py"

x, y, z, s = sp.symbols("x y z s", real=True, positive=False)


def antiderivatives():
    r = sp.sqrt(x**2 + y**2 + z**2)
    R = sp.sqrt(y**2 + z**2)
    F = {
        1: x*y/2 + (s**2 + z**2)/2*sp.atan(x/y)
           - s*z*sp.atan(x*z/(y*r)) - s*y*sp.asinh(x/R),
        2: sp.Rational(1, 6)*(2*(s**3 + 3*s*z**2)*sp.atan(x/y)
           - 2*z*(3*s**2 + z**2)*sp.atan(x*z/(y*r))
           - x*y*(-6*s + r) - y*(6*s**2 + y**2 + 3*z**2)*sp.asinh(x/R)),
        3: sp.Rational(1, 12)*(x*y*(18*s**2 + x**2 + 3*y**2 + 6*z**2 - 6*s*r)
           + 3*(s**4 + 6*s**2*z**2 + z**4)*sp.atan(x/y)
           - 12*s*z*(s**2 + z**2)*sp.atan(x*z/(y*r))
           - 6*y*s*(2*s**2 + y**2 + 3*z**2)*sp.asinh(x/R)),
    }
    return F


def verify(F):
    rng = np.random.default_rng(7)
    for d, Fd in F.items():
        r = sp.sqrt(x**2 + y**2 + z**2)
        g_expected = (s - r)**(d + 1)/(d + 1) * y/(x**2 + y**2)
        resid = sp.simplify(sp.together(sp.diff(Fd, x) - g_expected))
        assert resid == 0, f"d={d}: antiderivative mismatch: {resid}"
        # numeric spot check of every emitted derivative
        forms = derivative_set(Fd)
        for name, expr in forms.items():
            fn = sp.lambdify((x, y, z, s), expr, "numpy")
            for _ in range(20):
                xv, yv, zv = rng.uniform(-2, 2), rng.uniform(0.2, 2), rng.uniform(0.0, 2)
                sv = rng.uniform(3.5, 9)
                v = fn(xv, yv, zv, sv)
                assert np.isfinite(v), f"{name} d={d} not finite at {(xv, yv, zv, sv)}"
        print(f"d={d}: verified ({', '.join(forms)})")


def derivative_set(Fd):
    g = sp.diff(Fd, x)
    return {
        "F": Fd,
        "Fy": sp.diff(Fd, y),
        "Fz": sp.diff(Fd, z),
        "Fs": sp.diff(Fd, s),
        "Fzy": sp.diff(Fd, z, y),
        "Fzz": sp.diff(Fd, z, 2),
        "Fzs": sp.diff(Fd, z, s),
        "g": g,
        "gz": sp.diff(g, z),
    }


class Printer(NumPyPrinter):
    def _print_Pow(self, expr):  # avoid numpy.power for small integer powers
        base, exp = expr.as_base_exp()
        if exp.is_Integer and 1 < exp < 6:
            return "(" + "*".join([f"({self._print(base)})"] * int(exp)) + ")"
        return super()._print_Pow(expr)


def emit(F):
    printer = Printer({"fully_qualified_modules": False})
    chunks = [
        '"""Closed-form antiderivatives for retarded triangle potentials.',
        "",
        "Generated by tools/gen_closed_forms.py -- do not edit by hand.",
        "All functions expect z >= 0 and abs(y) bounded away from zero;",
        "callers pass |z| and handle odd-in-z signs explicitly.",
        '"""',
        "from numpy import arctan, arcsinh, sqrt",
        "",
        "__all__ = [\"UW_FORMS\", \"BM_FORMS\"]",
        "",
    ]
    uw_names = ["F", "Fz"]
    bm_names = ["g", "gz", "Fy", "Fz", "Fs", "Fzy", "Fzz", "Fzs"]
    for d, Fd in F.items():
        forms = derivative_set(Fd)
        for tag, names in (("uw", uw_names), ("bm", bm_names)):
            exprs = [forms[n] for n in names]
            repl, reduced = sp.cse(exprs, optimizations="basic")
            body = []
            for sym, val in repl:
                body.append(f"    {sym} = {printer.doprint(val)}")
            rets = ", ".join(printer.doprint(e) for e in reduced)
            chunks.append(f"def {tag}_d{d}(x, y, z, s):")
            chunks.append(f'    """{tag.upper()} closed forms for order d={d}: returns ({", ".join(names)})."""')
            chunks.extend(body)
            chunks.append(f"    return ({rets})")
            chunks.append("")
    chunks.append("UW_FORMS = {1: uw_d1, 2: uw_d2, 3: uw_d3}")
    chunks.append("BM_FORMS = {1: bm_d1, 2: bm_d2, 3: bm_d3}")
    chunks.append("")
    OUT.write_text("\n".join(chunks))
    print(f"wrote {OUT}")


def main():
    F = antiderivatives()
    verify(F)
    emit(F)
    # quick numeric round-trip of the generated module
    sys.path.insert(0, str(OUT.parent.parent))
    import importlib
    mod = importlib.import_module("tdwavebem._closed_forms")
    rng = np.random.default_rng(3)
    for d, Fd in F.items():
        forms = derivative_set(Fd)
        xe, ye, ze, se = rng.uniform(0.3, 1.5, size=4)
        got_uw = mod.UW_FORMS[d](xe, ye, ze, se)
        got_bm = mod.BM_FORMS[d](xe, ye, ze, se)
        for val, name in zip(got_uw, ["F", "Fz"]):
            want = float(forms[name].subs({x: xe, y: ye, z: ze, s: se}))
            assert abs(val - want) < 1e-10 * max(1, abs(want)), (d, name)
        for val, name in zip(got_bm, ["g", "gz", "Fy", "Fz", "Fs", "Fzy", "Fzz", "Fzs"]):
            want = float(forms[name].subs({x: xe, y: ye, z: ze, s: se}))
            assert abs(val - want) < 1e-10 * max(1, abs(want)), (d, name)
    print("generated module matches sympy reference")


if __name__ == "__main__":
    main()
