"""Sparse multivariate (Laurent) polynomials over Q(i).

A polynomial is a map ``exponent tuple -> GaussianRational`` with no stored
zeros.  Axes are 0-based in the Python API and 1-based in text (``t1`` is
axis 0).  The variable prefix (``t``, ``h``, ``x``) is display metadata and
does not take part in equality.

Also here: the graded order on exponent vectors used by the free-basis
reduction, and the diagonal Euler-type solver ``(t_i d_i + c) q = p``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator, Mapping, Sequence

from .scalars import ZERO, GaussianRational, ScalarParseError, as_scalar, format_scalar, parse_scalar

__all__ = [
    "MultiPoly",
    "LaurentMultiPoly",
    "DimensionError",
    "PolyParseError",
    "InconsistentEquation",
    "DiagonalSolution",
    "partial_derivative",
    "shift_substitute",
    "solve_diagonal",
    "compare_exponents",
    "exponent_key",
    "predecessor",
    "exponents_of_degree",
    "exponents_up_to",
    "parse_poly",
    "format_poly",
]

Exponent = tuple[int, ...]


class DimensionError(ValueError):
    """Operands live in polynomial rings with different numbers of variables."""


class PolyParseError(ScalarParseError):
    pass


class InconsistentEquation(ValueError):
    """A right-hand side has weight on the kernel of the diagonal operator."""

    def __init__(self, message: str, monomials: list[Exponent]) -> None:
        super().__init__(message)
        self.monomials = monomials


# ---------------------------------------------------------------------------
# exponent order


def exponent_key(m: Sequence[int]) -> tuple[int, Exponent]:
    """Sort key for the graded order: total degree, then leftmost difference."""
    return (sum(m), tuple(m))


def compare_exponents(r: Sequence[int], m: Sequence[int]) -> int:
    """Return -1, 0, 1 as ``r < m``, ``r == m``, ``r > m`` in the graded order."""
    kr, km = exponent_key(r), exponent_key(m)
    return (kr > km) - (kr < km)


def predecessor(m: Sequence[int]) -> Exponent:
    """The largest exponent vector strictly below ``m``."""
    m = tuple(m)
    if any(x < 0 for x in m):
        raise ValueError("predecessor is defined on Z_{>=0}^n only")
    if not any(m):
        raise ValueError("the zero vector has no predecessor")
    n = len(m)
    for l in range(n - 2, -1, -1):
        if m[l] > 0:
            tail = sum(m[l + 1 :]) + 1
            return m[:l] + (m[l] - 1, tail) + (0,) * (n - l - 2)
    # m = (0, ..., 0, d): step down to the largest vector of degree d - 1
    return (m[-1] - 1,) + (0,) * (n - 1)


def exponents_of_degree(n: int, d: int) -> Iterator[Exponent]:
    """All ``m`` in Z_{>=0}^n with ``|m| = d``, in increasing order."""
    if n == 1:
        yield (d,)
        return
    for first in range(d + 1):
        for rest in exponents_of_degree(n - 1, d - first):
            yield (first,) + rest


def exponents_up_to(n: int, d: int, *, even: bool = False) -> list[Exponent]:
    """All exponents of total degree at most ``d``, in increasing order."""
    out: list[Exponent] = []
    for k in range(d + 1):
        if even and k % 2:
            continue
        out.extend(exponents_of_degree(n, k))
    return out


# ---------------------------------------------------------------------------
# polynomials


@lru_cache(maxsize=4096)
def _binomial_expansion(e: int, s: int) -> tuple[tuple[int, int], ...]:
    """Coefficients of (x + s)^e as ((power, coeff), ...)."""
    return tuple((k, comb(e, k) * s ** (e - k)) for k in range(e + 1))


class MultiPoly:
    """A polynomial in ``nvars`` commuting variables with Q(i) coefficients."""

    __slots__ = ("nvars", "terms", "var")

    _laurent = False

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], object] | None = None, var: str = "t") -> None:
        if nvars < 1:
            raise DimensionError("nvars must be positive")
        clean: dict[Exponent, GaussianRational] = {}
        for m, c in (terms or {}).items():
            m = tuple(int(x) for x in m)
            if len(m) != nvars:
                raise DimensionError(f"exponent {m} has length {len(m)}, expected {nvars}")
            if not self._laurent and any(x < 0 for x in m):
                raise ValueError(f"negative exponent {m} in a polynomial; use LaurentMultiPoly")
            c = as_scalar(c)
            if c:
                clean[m] = clean.get(m, ZERO) + c
                if not clean[m]:
                    del clean[m]
        self.nvars = nvars
        self.terms = clean
        self.var = var

    @classmethod
    def _from_clean(cls, nvars: int, terms: dict, var: str = "t"):
        obj = object.__new__(cls)
        obj.nvars = nvars
        obj.terms = terms
        obj.var = var
        return obj

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int, var: str = "t"):
        return cls._from_clean(nvars, {}, var)

    @classmethod
    def constant(cls, nvars: int, c=1, var: str = "t"):
        return cls(nvars, {(0,) * nvars: c}, var)

    @classmethod
    def one(cls, nvars: int, var: str = "t"):
        return cls.constant(nvars, 1, var)

    @classmethod
    def variable(cls, nvars: int, axis: int, var: str = "t"):
        e = [0] * nvars
        e[axis] = 1
        return cls(nvars, {tuple(e): 1}, var)

    @classmethod
    def monomial(cls, exponent: Sequence[int], c=1, var: str = "t"):
        return cls(len(exponent), {tuple(exponent): c}, var)

    # -- inspection ---------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[tuple[Exponent, GaussianRational]]:
        return iter(self.terms.items())

    def coefficient(self, m: Sequence[int]) -> GaussianRational:
        return self.terms.get(tuple(m), ZERO)

    def constant_term(self) -> GaussianRational:
        return self.coefficient((0,) * self.nvars)

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=-1)

    def degree_in(self, axis: int) -> int:
        return max((m[axis] for m in self.terms), default=-1)

    def min_degree_in(self, axis: int) -> int:
        return min((m[axis] for m in self.terms), default=0)

    def is_even(self) -> bool:
        """True when every term has even total degree (membership in P_n)."""
        return all(sum(m) % 2 == 0 for m in self.terms)

    def leading_exponent(self) -> Exponent:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return max(self.terms, key=exponent_key)

    def evaluate(self, point: Sequence) -> GaussianRational:
        point = [as_scalar(p) for p in point]
        if len(point) != self.nvars:
            raise DimensionError("evaluation point has the wrong length")
        total = ZERO
        for m, c in self.terms.items():
            v = c
            for x, e in zip(point, m):
                if e:
                    v = v * x**e
            total = total + v
        return total

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: MultiPoly) -> None:
        if self.nvars != other.nvars:
            raise DimensionError(f"nvars mismatch: {self.nvars} vs {other.nvars}")

    def _result_cls(self, other: MultiPoly):
        return LaurentMultiPoly if (self._laurent or other._laurent) else MultiPoly

    def _lift(self, other):
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        return MultiPoly.constant(self.nvars, as_scalar(other), self.var)

    def __add__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        terms = dict(self.terms)
        for m, c in other.terms.items():
            v = terms.get(m)
            if v is None:
                terms[m] = c
            else:
                v = v + c
                if v:
                    terms[m] = v
                else:
                    del terms[m]
        return self._result_cls(other)._from_clean(self.nvars, terms, self.var)

    __radd__ = __add__

    def __neg__(self):
        return type(self)._from_clean(self.nvars, {m: -c for m, c in self.terms.items()}, self.var)

    def __sub__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> MultiPoly:
        c = as_scalar(c)
        if not c:
            return type(self).zero(self.nvars, self.var)
        return type(self)._from_clean(self.nvars, {m: v * c for m, v in self.terms.items()}, self.var)

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        self._check(other)
        terms: dict[Exponent, GaussianRational] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                v = terms.get(m)
                terms[m] = c1 * c2 if v is None else v + c1 * c2
        terms = {m: c for m, c in terms.items() if c}
        return self._result_cls(other)._from_clean(self.nvars, terms, self.var)

    def __rmul__(self, other):
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = type(self).one(self.nvars, self.var)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        try:
            c = as_scalar(other)
        except TypeError:
            return NotImplemented
        return self.terms == ({(0,) * self.nvars: c} if c else {})

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.nvars}, {format_poly(self)!r})"

    def __str__(self) -> str:
        return format_poly(self)

    # -- calculus -----------------------------------------------------------

    def diff(self, axis: int) -> MultiPoly:
        return partial_derivative(self, axis)

    def shift(self, s: Sequence[int]) -> MultiPoly:
        return shift_substitute(self, s)

    def with_var(self, var: str):
        return type(self)._from_clean(self.nvars, self.terms, var)

    def to_laurent(self) -> LaurentMultiPoly:
        return LaurentMultiPoly._from_clean(self.nvars, dict(self.terms), self.var)

    def to_polynomial(self) -> MultiPoly:
        return MultiPoly._from_clean(self.nvars, dict(self.terms), self.var)


class LaurentMultiPoly(MultiPoly):
    """As :class:`MultiPoly` but exponents may be negative (elements of R_n)."""

    __slots__ = ()
    _laurent = True

    def is_polynomial(self) -> bool:
        return all(x >= 0 for m in self.terms for x in m)

    def to_polynomial(self) -> MultiPoly:
        if not self.is_polynomial():
            raise ValueError(f"{format_poly(self)} has negative exponents")
        return MultiPoly._from_clean(self.nvars, dict(self.terms), self.var)


def partial_derivative(p: MultiPoly, axis: int) -> MultiPoly:
    """Formal partial derivative along ``axis`` (0-based)."""
    if not 0 <= axis < p.nvars:
        raise DimensionError(f"axis {axis} out of range for {p.nvars} variables")
    terms = {}
    for m, c in p.terms.items():
        e = m[axis]
        if e:
            terms[m[:axis] + (e - 1,) + m[axis + 1 :]] = c * e
    return type(p)._from_clean(p.nvars, terms, p.var)


def shift_substitute(p: MultiPoly, s: Sequence[int]) -> MultiPoly:
    """Return ``p(x_1 + s_1, ..., x_n + s_n)`` expanded.

    ``sigma_i`` (``h_i -> h_i - 1``) is ``shift_substitute(p, -e_i)``.
    """
    s = tuple(int(x) for x in s)
    if len(s) != p.nvars:
        raise DimensionError("shift vector has the wrong length")
    if p._laurent and not p.is_polynomial() and any(s):
        raise ValueError("cannot shift a Laurent polynomial with negative exponents")
    if not any(s):
        return p
    terms: dict[Exponent, GaussianRational] = {}
    for m, c in p.terms.items():
        factors = [_binomial_expansion(e, si) if si else ((e, 1),) for e, si in zip(m, s)]
        for combo in itertools.product(*factors):
            k = 1
            for _, coeff in combo:
                k *= coeff
            if not k:
                continue
            e = tuple(pw for pw, _ in combo)
            v = terms.get(e)
            terms[e] = c * k if v is None else v + c * k
    terms = {m: c for m, c in terms.items() if c}
    return type(p)._from_clean(p.nvars, terms, p.var)


# ---------------------------------------------------------------------------
# diagonal solver


@dataclass(frozen=True)
class DiagonalSolution:
    """Result of solving ``(t_i d_i + offset) q = rhs``.

    ``solution`` vanishes on the kernel.  When ``ambiguous`` is set, any
    polynomial supported on monomials with ``m[axis] == kernel_exponent``
    may be added to it.
    """

    solution: MultiPoly
    axis: int
    kernel_exponent: int | None

    @property
    def ambiguous(self) -> bool:
        return self.kernel_exponent is not None

    def in_kernel(self, p: MultiPoly) -> bool:
        """True when ``p`` is annihilated by the diagonal operator."""
        if not self.ambiguous:
            return not p
        return all(m[self.axis] == self.kernel_exponent for m in p.terms)

    def kernel_monomials(self, max_degree: int) -> list[Exponent]:
        if not self.ambiguous:
            return []
        n = self.solution.nvars
        return [m for m in exponents_up_to(n, max_degree) if m[self.axis] == self.kernel_exponent]


def solve_diagonal(axis: int, offset, rhs: MultiPoly) -> DiagonalSolution:
    """Solve ``(t_axis d_axis + offset) q = rhs`` monomial by monomial.

    ``t^m`` is an eigenvector with eigenvalue ``m[axis] + offset``.  A nonzero
    ``rhs`` coefficient on a zero-eigenvalue monomial raises
    :class:`InconsistentEquation`.
    """
    offset = as_scalar(offset)
    if not 0 <= axis < rhs.nvars:
        raise DimensionError(f"axis {axis} out of range")
    kernel_exponent = None
    if offset.is_real() and offset.re.denominator == 1 and offset.re <= 0:
        kernel_exponent = int(-offset.re)
    bad = []
    terms = {}
    for m, c in rhs.terms.items():
        eig = offset + m[axis]
        if not eig:
            bad.append(m)
        else:
            terms[m] = c / eig
    if bad:
        raise InconsistentEquation(
            f"inconsistent: rhs has nonzero coefficients on kernel monomials {sorted(bad)}", sorted(bad)
        )
    return DiagonalSolution(type(rhs)._from_clean(rhs.nvars, terms, rhs.var), axis, kernel_exponent)


# ---------------------------------------------------------------------------
# text grammar
#
#   expr    := [sign] term (sign term)*
#   term    := factor ("*" factor)*
#   factor  := number ["i"] | "i" | "(" scalar ")" | name index ["^" [sign] digits]


class _Scanner:
    def __init__(self, text: str, error=PolyParseError) -> None:
        self.text = text
        self.pos = 0
        self.error = error

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def fail(self, message: str, pos: int | None = None):
        raise self.error(message, self.text, self.pos if pos is None else pos)

    def digits(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        return self.text[start : self.pos]


def _scan_factor(sc: _Scanner):
    """Return ('c', scalar) or ('v', name, index, exponent)."""
    ch = sc.peek()
    start = sc.pos
    if ch == "(":
        depth_end = sc.text.find(")", sc.pos)
        if depth_end < 0:
            sc.fail("unclosed parenthesis")
        inner = sc.text[sc.pos + 1 : depth_end]
        try:
            value = parse_scalar(inner)
        except ScalarParseError as exc:
            sc.fail("bad scalar: " + str(exc).split(" at position")[0], sc.pos + 1 + exc.position)
        sc.pos = depth_end + 1
        return ("c", value)
    if ch.isdigit():
        num = sc.digits()
        value = GaussianRational(int(num))
        if sc.pos < len(sc.text) and sc.text[sc.pos] == "/":
            sc.pos += 1
            den = sc.digits()
            if not den or int(den) == 0:
                sc.fail("bad denominator")
            value = value / int(den)
        if sc.pos < len(sc.text) and sc.text[sc.pos] == "i" and not (
            sc.pos + 1 < len(sc.text) and sc.text[sc.pos + 1].isalnum()
        ):
            sc.pos += 1
            value = value * GaussianRational(0, 1)
        return ("c", value)
    if ch.isalpha():
        nstart = sc.pos
        while sc.pos < len(sc.text) and sc.text[sc.pos].isalpha():
            sc.pos += 1
        name = sc.text[nstart : sc.pos]
        idx = sc.digits()
        if not idx:
            if name == "i":
                return ("c", GaussianRational(0, 1))
            sc.fail(f"variable {name!r} needs an index", nstart)
        index = int(idx)
        if index < 1:
            sc.fail("variable indices start at 1", nstart)
        exp = 1
        if sc.peek() == "^":
            sc.pos += 1
            sc.skip()
            sign = 1
            if sc.pos < len(sc.text) and sc.text[sc.pos] in "+-":
                sign = -1 if sc.text[sc.pos] == "-" else 1
                sc.pos += 1
            e = sc.digits()
            if not e:
                sc.fail("expected exponent")
            exp = sign * int(e)
        return ("v", name, index, exp)
    sc.fail("unexpected character" if ch else "unexpected end of input", start)


def _scan_terms(text: str, error=PolyParseError):
    """Parse into a list of (scalar, [(name, index, exp), ...])."""
    sc = _Scanner(text, error)
    out = []
    if not sc.peek():
        sc.fail("empty expression")
    sign = 1
    if sc.peek() in "+-":
        sign = -1 if sc.peek() == "-" else 1
        sc.pos += 1
    while True:
        coeff = GaussianRational(sign)
        factors = []
        while True:
            f = _scan_factor(sc)
            if f[0] == "c":
                coeff = coeff * f[1]
            else:
                factors.append(f[1:])
            if sc.peek() == "*":
                sc.pos += 1
                continue
            break
        out.append((coeff, factors))
        ch = sc.peek()
        if not ch:
            break
        if ch not in "+-":
            sc.fail("expected '+', '-' or '*'")
        sign = -1 if ch == "-" else 1
        sc.pos += 1
    return out


def parse_poly(text: str, nvars: int | None = None, *, laurent: bool = False) -> MultiPoly:
    """Parse ``"3/2*t1^2*t2 - i*t3"``.  ``nvars`` defaults to the largest index."""
    parsed = _scan_terms(text)
    names = {name for _, fs in parsed for name, _, _ in fs}
    if len(names) > 1:
        raise PolyParseError(f"mixed variable names {sorted(names)}", text, 0)
    var = names.pop() if names else "t"
    if var == "d":
        raise PolyParseError("'d' factors denote derivatives, not polynomial variables", text, 0)
    top = max((idx for _, fs in parsed for _, idx, _ in fs), default=1)
    if nvars is None:
        nvars = top
    elif top > nvars:
        raise PolyParseError(f"variable index {top} exceeds nvars={nvars}", text, 0)
    terms: dict[Exponent, GaussianRational] = {}
    for coeff, fs in parsed:
        e = [0] * nvars
        for _, idx, exp in fs:
            e[idx - 1] += exp
        key = tuple(e)
        terms[key] = terms.get(key, ZERO) + coeff
    cls = LaurentMultiPoly if laurent or any(x < 0 for m in terms for x in m) else MultiPoly
    if cls is LaurentMultiPoly and not laurent:
        raise PolyParseError("negative exponent in a polynomial", text, 0)
    return cls(nvars, terms, var)


def _format_monomial(m: Sequence[int], var: str) -> str:
    parts = []
    for k, e in enumerate(m):
        if e == 1:
            parts.append(f"{var}{k + 1}")
        elif e:
            parts.append(f"{var}{k + 1}^{e}")
    return "*".join(parts)


def format_coefficient_term(c: GaussianRational, body: str) -> tuple[str, str]:
    """Return (sign, text) for one term of a sum; shared with operator text."""
    if not c.im and c.re < 0:
        sign, c = "-", -c
    elif not c.re and c.im < 0:
        sign, c = "-", -c
    else:
        sign = "+"
    if not body:
        return sign, format_scalar(c)
    if c == 1:
        return sign, body
    s = format_scalar(c)
    if c.re and c.im:
        s = f"({s})"
    return sign, f"{s}*{body}"


def join_terms(pieces: Iterable[tuple[str, str]]) -> str:
    out = ""
    for sign, text in pieces:
        if not out:
            out = text if sign == "+" else "-" + text
        else:
            out += f" {sign} {text}"
    return out or "0"


def format_poly(p: MultiPoly) -> str:
    """Canonical text, highest term first in the graded order."""
    keys = sorted(p.terms, key=exponent_key, reverse=True)
    return join_terms(format_coefficient_term(p.terms[m], _format_monomial(m, p.var)) for m in keys)
