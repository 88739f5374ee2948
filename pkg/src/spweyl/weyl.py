"""Normal-ordered arithmetic in the (localized) Weyl algebra.

An element is a finite sum ``c * t^alpha d^beta`` with every ``t`` to the left
of every ``d``.  ``alpha`` may have negative entries, which localizes at
``t_1 ... t_n`` and makes operators such as ``t_i^{-1} d_i`` first class.
Products use the closed rewrite

    d^b t^a = sum_k C(b, k) (a)_k t^(a-k) d^(b-k)

per variable, where ``(a)_k`` is the falling factorial; it is valid for
negative ``a`` as well.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb
from typing import Iterator, Mapping, Sequence

from .polyalg import (
    DimensionError,
    Exponent,
    LaurentMultiPoly,
    MultiPoly,
    PolyParseError,
    _format_monomial,
    _scan_terms,
    format_coefficient_term,
    join_terms,
)
from .scalars import ZERO, GaussianRational, as_scalar

__all__ = [
    "WeylElement",
    "LeavesPolynomialRing",
    "falling_factorial",
    "weyl_mul",
    "weyl_commutator",
    "weyl_apply",
    "is_even",
    "parse_operator",
    "format_operator",
]

Key = tuple[Exponent, Exponent]


class LeavesPolynomialRing(ValueError):
    """A Laurent operator produced negative exponents on a polynomial carrier."""


def falling_factorial(a: int, k: int) -> int:
    """``a (a-1) ... (a-k+1)``; 1 when ``k == 0``."""
    out = 1
    for j in range(k):
        out *= a - j
    return out


@lru_cache(maxsize=8192)
def _reorder(b: int, a: int) -> tuple[tuple[int, int], ...]:
    """``d^b t^a`` as ((k, coeff), ...) standing for coeff * t^(a-k) d^(b-k)."""
    out = []
    for k in range(b + 1):
        c = comb(b, k) * falling_factorial(a, k)
        if c:
            out.append((k, c))
    return tuple(out)


class WeylElement:
    """A normal-ordered element of the Weyl algebra in ``nvars`` variables."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[tuple[Sequence[int], Sequence[int]], object] | None = None) -> None:
        if nvars < 1:
            raise DimensionError("nvars must be positive")
        clean: dict[Key, GaussianRational] = {}
        for (alpha, beta), c in (terms or {}).items():
            alpha = tuple(int(x) for x in alpha)
            beta = tuple(int(x) for x in beta)
            if len(alpha) != nvars or len(beta) != nvars:
                raise DimensionError("exponent length does not match nvars")
            if any(x < 0 for x in beta):
                raise ValueError("derivative exponents must be non-negative")
            c = as_scalar(c)
            if c:
                key = (alpha, beta)
                v = clean.get(key, ZERO) + c
                if v:
                    clean[key] = v
                else:
                    clean.pop(key, None)
        self.nvars = nvars
        self.terms = clean

    @classmethod
    def _from_clean(cls, nvars: int, terms: dict) -> WeylElement:
        obj = object.__new__(cls)
        obj.nvars = nvars
        obj.terms = terms
        return obj

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> WeylElement:
        return cls._from_clean(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c=1) -> WeylElement:
        z = (0,) * nvars
        return cls(nvars, {(z, z): c})

    @classmethod
    def one(cls, nvars: int) -> WeylElement:
        return cls.constant(nvars, 1)

    @classmethod
    def t(cls, nvars: int, axis: int, power: int = 1) -> WeylElement:
        a = [0] * nvars
        a[axis] = power
        return cls(nvars, {(tuple(a), (0,) * nvars): 1})

    @classmethod
    def d(cls, nvars: int, axis: int, power: int = 1) -> WeylElement:
        b = [0] * nvars
        b[axis] = power
        return cls(nvars, {((0,) * nvars, tuple(b)): 1})

    @classmethod
    def monomial(cls, alpha: Sequence[int], beta: Sequence[int], c=1) -> WeylElement:
        return cls(len(alpha), {(tuple(alpha), tuple(beta)): c})

    @classmethod
    def from_poly(cls, p: MultiPoly) -> WeylElement:
        """The multiplication operator by ``p``."""
        z = (0,) * p.nvars
        return cls._from_clean(p.nvars, {(m, z): c for m, c in p.terms.items()})

    # -- inspection ---------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self) -> Iterator[tuple[Key, GaussianRational]]:
        return iter(self.terms.items())

    def coefficient(self, alpha: Sequence[int], beta: Sequence[int]) -> GaussianRational:
        return self.terms.get((tuple(alpha), tuple(beta)), ZERO)

    def is_laurent(self) -> bool:
        return any(x < 0 for (a, _) in self.terms for x in a)

    def is_multiplication(self) -> bool:
        return all(not any(b) for (_, b) in self.terms)

    def order(self) -> int:
        """Highest total derivative order; -1 for zero."""
        return max((sum(b) for (_, b) in self.terms), default=-1)

    def as_poly(self) -> MultiPoly:
        """The multiplier of a pure multiplication operator."""
        if not self.is_multiplication():
            raise ValueError("element contains derivatives")
        cls = LaurentMultiPoly if self.is_laurent() else MultiPoly
        return cls(self.nvars, {a: c for (a, _), c in self.terms.items()})

    # -- arithmetic ---------------------------------------------------------

    def _lift(self, other) -> WeylElement:
        if isinstance(other, WeylElement):
            if other.nvars != self.nvars:
                raise DimensionError(f"nvars mismatch: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise DimensionError(f"nvars mismatch: {self.nvars} vs {other.nvars}")
            return WeylElement.from_poly(other)
        return WeylElement.constant(self.nvars, as_scalar(other))

    def __add__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        terms = dict(self.terms)
        for k, c in other.terms.items():
            v = terms.get(k)
            if v is None:
                terms[k] = c
            else:
                v = v + c
                if v:
                    terms[k] = v
                else:
                    del terms[k]
        return WeylElement._from_clean(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self) -> WeylElement:
        return WeylElement._from_clean(self.nvars, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> WeylElement:
        c = as_scalar(c)
        if not c:
            return WeylElement.zero(self.nvars)
        return WeylElement._from_clean(self.nvars, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (WeylElement, MultiPoly)):
            return weyl_mul(self, self._lift(other))
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, MultiPoly):
            return weyl_mul(self._lift(other), self)
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __pow__(self, k: int) -> WeylElement:
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = WeylElement.one(self.nvars)
        for _ in range(k):
            result = weyl_mul(result, self)
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, WeylElement):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, MultiPoly):
            return self == WeylElement.from_poly(other)
        try:
            c = as_scalar(other)
        except TypeError:
            return NotImplemented
        return self == WeylElement.constant(self.nvars, c)

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"WeylElement({self.nvars}, {format_operator(self)!r})"

    def __str__(self) -> str:
        return format_operator(self)

    def __call__(self, p: MultiPoly) -> MultiPoly:
        return weyl_apply(self, p)


def weyl_mul(a: WeylElement, b: WeylElement) -> WeylElement:
    """Normal-ordered product ``a * b``."""
    if a.nvars != b.nvars:
        raise DimensionError(f"nvars mismatch: {a.nvars} vs {b.nvars}")
    n = a.nvars
    terms: dict[Key, GaussianRational] = {}
    for (a1, b1), c1 in a.terms.items():
        for (a2, b2), c2 in b.terms.items():
            c = c1 * c2
            per_var = [_reorder(b1[i], a2[i]) for i in range(n)]
            for combo in itertools.product(*per_var):
                k = 1
                alpha = []
                beta = []
                for i, (j, coeff) in enumerate(combo):
                    k *= coeff
                    alpha.append(a1[i] + a2[i] - j)
                    beta.append(b1[i] - j + b2[i])
                key = (tuple(alpha), tuple(beta))
                v = terms.get(key)
                terms[key] = c * k if v is None else v + c * k
    return WeylElement._from_clean(n, {k: c for k, c in terms.items() if c})


def weyl_commutator(a: WeylElement, b: WeylElement) -> WeylElement:
    """``ab - ba``."""
    return weyl_mul(a, b) - weyl_mul(b, a)


def is_even(a: WeylElement) -> bool:
    """Membership in the even Weyl algebra: every term has ``|alpha| + |beta|``
    even and no negative ``t`` exponent."""
    for alpha, beta in a.terms:
        if any(x < 0 for x in alpha):
            return False
        if (sum(alpha) + sum(beta)) % 2:
            return False
    return True


def weyl_apply(a: WeylElement, p: MultiPoly) -> MultiPoly:
    """Act with ``a`` on ``p``.

    The result has the carrier type of ``p``; a polynomial carrier raises
    :class:`LeavesPolynomialRing` if a negative exponent would appear.
    """
    if a.nvars != p.nvars:
        raise DimensionError(f"nvars mismatch: {a.nvars} vs {p.nvars}")
    terms: dict[Exponent, GaussianRational] = {}
    for (alpha, beta), c in a.terms.items():
        for m, cp in p.terms.items():
            k = 1
            for mi, bi in zip(m, beta):
                if bi:
                    k *= falling_factorial(mi, bi)
                    if not k:
                        break
            if not k:
                continue
            e = tuple(mi - bi + ai for mi, bi, ai in zip(m, beta, alpha))
            v = terms.get(e)
            terms[e] = c * cp * k if v is None else v + c * cp * k
    terms = {e: c for e, c in terms.items() if c}
    if not p._laurent and any(x < 0 for e in terms for x in e):
        raise LeavesPolynomialRing(f"{format_operator(a)} maps {p} outside the polynomial ring")
    return type(p)._from_clean(p.nvars, terms, p.var)


# ---------------------------------------------------------------------------
# text grammar: polynomial grammar plus "d<k>^e" factors written after t's


def parse_operator(text: str, nvars: int | None = None) -> WeylElement:
    """Parse ``"-1*d1^2 + 2*t1^-1*d1"``.  ``d`` factors must follow ``t`` factors."""
    parsed = _scan_terms(text)
    names = {name for _, fs in parsed for name, _, _ in fs} - {"d"}
    if len(names) > 1:
        raise PolyParseError(f"mixed variable names {sorted(names)}", text, 0)
    top = max((idx for _, fs in parsed for _, idx, _ in fs), default=1)
    if nvars is None:
        nvars = top
    elif top > nvars:
        raise PolyParseError(f"variable index {top} exceeds nvars={nvars}", text, 0)
    terms: dict[Key, GaussianRational] = {}
    for coeff, fs in parsed:
        alpha = [0] * nvars
        beta = [0] * nvars
        seen_d = False
        for name, idx, exp in fs:
            if name == "d":
                if exp < 0:
                    raise PolyParseError("negative derivative exponent", text, 0)
                seen_d = True
                beta[idx - 1] += exp
            else:
                if seen_d:
                    raise PolyParseError("t factors must precede d factors (normal order)", text, 0)
                alpha[idx - 1] += exp
        key = (tuple(alpha), tuple(beta))
        terms[key] = terms.get(key, ZERO) + coeff
    return WeylElement(nvars, terms)


def _weyl_key(key: Key):
    alpha, beta = key
    return (sum(beta), beta, sum(alpha), alpha)


def format_operator(a: WeylElement, var: str = "t") -> str:
    """Canonical operator text, highest derivative order first."""
    pieces = []
    for key in sorted(a.terms, key=_weyl_key, reverse=True):
        alpha, beta = key
        body = "*".join(x for x in (_format_monomial(alpha, var), _format_monomial(beta, "d")) if x)
        pieces.append(format_coefficient_term(a.terms[key], body))
    return join_terms(pieces)
