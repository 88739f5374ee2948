"""Exact arithmetic in the Gaussian rationals Q(i).

Every coefficient in the package is a :class:`GaussianRational`.  Real and
imaginary parts are :class:`fractions.Fraction` values, so equality is
structural and no precision is ever lost.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

__all__ = [
    "GaussianRational",
    "ScalarParseError",
    "as_scalar",
    "parse_scalar",
    "format_scalar",
    "parse_scalar_list",
    "ZERO",
    "ONE",
    "I",
]


class ScalarParseError(ValueError):
    """Malformed scalar text.  ``position`` is the offending character index."""

    def __init__(self, message: str, text: str, position: int) -> None:
        super().__init__(f"{message} at position {position} in {text!r}")
        self.text = text
        self.position = position


class GaussianRational:
    """An exact complex number ``re + im*i`` with rational parts.

    Instances are immutable and hashable.  Plain ``int`` and ``Fraction``
    operands are coerced, and a value with zero imaginary part compares and
    hashes equal to the corresponding rational.
    """

    __slots__ = ("re", "im")

    re: Fraction
    im: Fraction

    def __init__(self, re=0, im=0) -> None:
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> GaussianRational:
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "im", im)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    def __reduce__(self):
        return (GaussianRational, (self.re, self.im))

    # -- predicates ---------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def is_real(self) -> bool:
        return not self.im

    def norm(self) -> Fraction:
        """The field norm ``re^2 + im^2``."""
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> GaussianRational:
        return GaussianRational._raw(self.re, -self.im)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return GaussianRational._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return GaussianRational._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self) -> GaussianRational:
        return GaussianRational._raw(-self.re, -self.im)

    def __pos__(self) -> GaussianRational:
        return self

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            a, b, c, d = self.re, self.im, other.re, other.im
            if not b and not d:
                return GaussianRational._raw(a * c, b)
            return GaussianRational._raw(a * c - b * d, a * d + b * c)
        if isinstance(other, (int, Rational)):
            other = Fraction(other)
            return GaussianRational._raw(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def inverse(self) -> GaussianRational:
        n = self.norm()
        if not n:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussianRational._raw(self.re / n, -self.im / n)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k: int) -> GaussianRational:
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparison / hashing -----------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Rational)):
            return not self.im and self.re == other
        if isinstance(other, complex):
            return self.re == other.real and self.im == other.imag
        return NotImplemented

    def __hash__(self) -> int:
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self) -> str:
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self) -> str:
        return format_scalar(self)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


def _coerce(x) -> GaussianRational | None:
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Rational)):
        return GaussianRational._raw(Fraction(x), Fraction(0))
    return None


def as_scalar(x) -> GaussianRational:
    """Coerce an int, Fraction, scalar text or GaussianRational to a scalar."""
    if isinstance(x, str):
        return parse_scalar(x)
    y = _coerce(x)
    if y is None:
        raise TypeError(f"cannot interpret {x!r} as a Gaussian rational")
    return y


# -- text grammar ------------------------------------------------------------
#
#   scalar   := real | imag | real sign imag
#   real     := [sign] digits ["/" digits]
#   imag     := [sign] [digits ["/" digits]] "i"


def _scan_rational(text: str, pos: int) -> tuple[Fraction | None, int]:
    start = pos
    while pos < len(text) and text[pos].isdigit():
        pos += 1
    if pos == start:
        return None, start
    num = int(text[start:pos])
    if pos < len(text) and text[pos] == "/":
        dstart = pos + 1
        pos = dstart
        while pos < len(text) and text[pos].isdigit():
            pos += 1
        if pos == dstart:
            raise ScalarParseError("expected denominator", text, dstart)
        den = int(text[dstart:pos])
        if den == 0:
            raise ScalarParseError("zero denominator", text, dstart)
        return Fraction(num, den), pos
    return Fraction(num), pos


def _scan_signed_part(text: str, pos: int) -> tuple[Fraction, bool, int]:
    """Scan ``[sign] [rational] ["i"]``; returns (value, is_imaginary, end)."""
    sign = 1
    if pos < len(text) and text[pos] in "+-":
        sign = -1 if text[pos] == "-" else 1
        pos += 1
    value, end = _scan_rational(text, pos)
    if end < len(text) and text[end] == "i":
        return sign * (value if value is not None else Fraction(1)), True, end + 1
    if value is None:
        raise ScalarParseError("expected a number or 'i'", text, pos)
    return sign * value, False, end


def parse_scalar(text: str) -> GaussianRational:
    """Parse ``"3/2-1/3i"``, ``"i"``, ``"-2"``, ``"1+i"`` and similar forms."""
    s = text.strip()
    offset = len(text) - len(text.lstrip())
    if not s:
        raise ScalarParseError("empty scalar", text, 0)
    try:
        first, first_imag, pos = _scan_signed_part(s, 0)
        if pos == len(s):
            return GaussianRational(0, first) if first_imag else GaussianRational(first)
        if first_imag or s[pos] not in "+-":
            raise ScalarParseError("unexpected character", s, pos)
        second, second_imag, pos = _scan_signed_part(s, pos)
        if not second_imag:
            raise ScalarParseError("second part must be imaginary", s, pos)
        if pos != len(s):
            raise ScalarParseError("trailing characters", s, pos)
    except ScalarParseError as exc:
        raise ScalarParseError(str(exc).split(" at position")[0], text, exc.position + offset) from None
    return GaussianRational(first, second)


def _format_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(x: GaussianRational) -> str:
    """Canonical text: reduced fractions, real part first, ``i`` suffix."""
    re, im = x.re, x.im
    if not im:
        return _format_fraction(re)
    if abs(im) == 1:
        imag = "i" if im > 0 else "-i"
    else:
        imag = _format_fraction(im) + "i"
    if not re:
        return imag
    return _format_fraction(re) + (imag if imag.startswith("-") else "+" + imag)


def parse_scalar_list(text: str) -> list[GaussianRational]:
    """Comma separated scalars, e.g. ``"i,i"`` or ``"2,-3"``."""
    parts = [p for p in text.split(",")]
    if not text.strip() or any(not p.strip() for p in parts):
        raise ScalarParseError("empty entry in scalar list", text, 0)
    return [parse_scalar(p) for p in parts]
