"""Shared hypothesis strategies and sympy bridges used as independent oracles."""

from __future__ import annotations

import sys
from fractions import Fraction

import sympy
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from spweyl.polyalg import LaurentMultiPoly, MultiPoly
from spweyl.scalars import GaussianRational
from spweyl.weyl import WeylElement

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

small_fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)
scalars = st.builds(GaussianRational, small_fractions, small_fractions)
nonzero_scalars = scalars.filter(bool)


@st.composite
def exponents(draw, n: int, max_deg: int, low: int = 0):
    """Exponent vectors with ``sum |m_i| <= max_deg`` and entries ``>= low``."""
    out, budget = [], max_deg
    for _ in range(n):
        x = draw(st.integers(max(low, -budget), budget))
        budget -= abs(x)
        out.append(x)
    return tuple(out)


def polys(n: int, max_deg: int = 4, max_terms: int = 4, var: str = "t"):
    return st.dictionaries(exponents(n, max_deg), scalars, max_size=max_terms).map(lambda d: MultiPoly(n, d, var))


def even_polys(n: int, max_deg: int = 4, max_terms: int = 4):
    return polys(n, max_deg, max_terms).map(lambda p: MultiPoly(n, {m: c for m, c in p.terms.items() if sum(m) % 2 == 0}))


def laurent_polys(n: int, max_deg: int = 3, max_terms: int = 4):
    return st.dictionaries(exponents(n, max_deg, -max_deg), scalars, max_size=max_terms).map(
        lambda d: LaurentMultiPoly(n, d)
    )


def weyl_elements(n: int, max_deg: int = 3, max_terms: int = 3, laurent: bool = False):
    key = st.tuples(exponents(n, max_deg, -max_deg if laurent else 0), exponents(n, max_deg))
    return st.dictionaries(key, scalars, max_size=max_terms).map(lambda d: WeylElement(n, d))


# -- sympy bridges ---------------------------------------------------------


def sym_scalar(c: GaussianRational):
    return sympy.Rational(c.re.numerator, c.re.denominator) + sympy.I * sympy.Rational(c.im.numerator, c.im.denominator)


def from_sym_scalar(z) -> GaussianRational:
    re, im = sympy.nsimplify(z).as_real_imag()
    return GaussianRational(Fraction(int(sympy.numer(re)), int(sympy.denom(re))), Fraction(int(sympy.numer(im)), int(sympy.denom(im))))


def sym_vars(n: int, name: str = "t"):
    return sympy.symbols(f"{name}1:{n + 1}")


def to_sym(p: MultiPoly, syms=None):
    syms = syms or sym_vars(p.nvars, p.var)
    out = sympy.Integer(0)
    for m, c in p.terms.items():
        term = sym_scalar(c)
        for s, e in zip(syms, m):
            term *= s**e
        out += term
    return sympy.expand(out)


def from_sym(expr, n: int, var: str = "t", laurent: bool = False) -> MultiPoly:
    syms = sym_vars(n, var)
    terms = {}
    for term in sympy.Add.make_args(sympy.expand(expr)):
        if term == 0:
            continue
        powers = term.as_powers_dict()
        m = tuple(int(powers.get(s, 0)) for s in syms)
        c = sympy.simplify(term / sympy.Mul(*[s**e for s, e in zip(syms, m)]))
        terms[m] = terms.get(m, 0) + from_sym_scalar(c)
    cls = LaurentMultiPoly if laurent else MultiPoly
    return cls(n, terms, var)


def sym_apply(w: WeylElement, expr, syms):
    """Apply a Weyl element to a sympy expression by literal differentiation."""
    out = sympy.Integer(0)
    for (alpha, beta), c in w.terms.items():
        d = expr
        for s, b in zip(syms, beta):
            if b:
                d = sympy.diff(d, s, b)
        for s, a in zip(syms, alpha):
            d = d * s**a
        out += sym_scalar(c) * d
    return sympy.expand(out)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
