"""Emit Rust for w = sin^2(pi x) sin^2(pi y), its derivatives and bilaplacian.

Usage: python3 gen_manufactured.py > ../src/postproc/manufactured_gen.rs
"""
import re

import sympy as sp

x, y = sp.symbols("x y", real=True)
w = sp.sin(sp.pi * x) ** 2 * sp.sin(sp.pi * y) ** 2
exprs = {
    "value": w,
    "dx": sp.diff(w, x),
    "dy": sp.diff(w, y),
    "dxx": sp.diff(w, x, 2),
    "dxy": sp.diff(w, x, y),
    "dyy": sp.diff(w, y, 2),
    "bilaplacian": sp.diff(w, x, 4) + 2 * sp.diff(w, x, 2, y, 2) + sp.diff(w, y, 4),
}


def to_rust(e):
    s = sp.ccode(sp.factor_terms(e))
    s = s.replace("M_PI", "PI")
    s = re.sub(r"\bpow\(", "f64::powi(", s)
    s = re.sub(r"\b(sin|cos)\(", r"f64::\1(", s)
    # integer literals to floats, leaving powi exponents alone
    s = re.sub(r"(?<![\w.])(\d+)(?![\w.])(?!\))", r"\1.0", s)
    s = re.sub(r", (\d+)\.0\)", r", \1)", s)
    return s


print("// Generated by scripts/gen_manufactured.py. Do not edit.")
print()
print("use std::f64::consts::PI;")
print()
for name, e in exprs.items():
    print("#[rustfmt::skip]")
    print(f"pub(crate) fn {name}(x: f64, y: f64) -> f64 {{")
    print(f"    {to_rust(e)}")
    print("}")
    print()
