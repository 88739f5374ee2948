"""The symplectic Lie algebra sp(2n): basis labels, matrices and brackets.

The 2n x 2n matrix realization is the ground truth.  Brackets are matrix
commutators, mapped back to basis coordinates by an exact left inverse.  The
closed-form bracket table is only used as a test target
(:func:`verify_eq1_suite`).

Indices are 0-based in Python and 1-based in text labels: ``Xp(1,2)`` is
``SpBasisElement("Xp", 0, 1)``.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

from . import linalg
from .scalars import ZERO, GaussianRational, as_scalar, format_scalar

__all__ = [
    "SpBasisElement",
    "SpMatrix",
    "SpElement",
    "Xp",
    "Xm",
    "Xe",
    "H",
    "E",
    "basis",
    "dimension",
    "realize",
    "to_matrix",
    "coordinates",
    "bracket",
    "structure_constants",
    "symplectic_form",
    "verify_eq1_suite",
    "jacobi_violations",
    "parse_label",
    "LabelError",
]

KINDS = ("h", "Xe", "Xp", "Xm")


class LabelError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class SpBasisElement:
    """A basis vector of sp(2n).

    ``Xp(i,j)`` is the root vector of e_i + e_j (``Xp(i,i)`` is X_{2e_i}),
    ``Xm(i,j)`` that of -e_i - e_j, ``Xe(i,j)`` that of e_i - e_j (i != j),
    and ``h(i)`` the Cartan element.
    """

    kind: str
    i: int
    j: int = -1

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise LabelError(f"unknown kind {self.kind!r}")
        if self.i < 0 or (self.kind != "h" and self.j < 0):
            raise LabelError("indices must be non-negative")
        if self.kind in ("Xp", "Xm") and self.i > self.j:
            raise LabelError("symmetric labels are stored with i <= j; use Xp()/Xm()")
        if self.kind == "Xe" and self.i == self.j:
            raise LabelError("Xe(i,i) is not a basis element; use h(i)")
        if self.kind == "h" and self.j != -1:
            raise LabelError("h takes one index")

    @property
    def label(self) -> str:
        if self.kind == "h":
            return f"h({self.i + 1})"
        return f"{self.kind}({self.i + 1},{self.j + 1})"

    def __str__(self) -> str:
        return self.label

    def root(self, n: int) -> tuple[int, ...]:
        """The root as a vector of values on h_1..h_n (zero for Cartan)."""
        r = [0] * n
        if self.kind == "Xp":
            r[self.i] += 1
            r[self.j] += 1
        elif self.kind == "Xm":
            r[self.i] -= 1
            r[self.j] -= 1
        elif self.kind == "Xe":
            r[self.i] += 1
            r[self.j] -= 1
        return tuple(r)

    def max_index(self) -> int:
        return max(self.i, self.j)


def Xp(i: int, j: int) -> SpBasisElement:
    return SpBasisElement("Xp", min(i, j), max(i, j))


def Xm(i: int, j: int) -> SpBasisElement:
    return SpBasisElement("Xm", min(i, j), max(i, j))


def Xe(i: int, j: int) -> SpBasisElement:
    return SpBasisElement("Xe", i, j)


def H(i: int) -> SpBasisElement:
    return SpBasisElement("h", i)


def E(i: int, j: int) -> SpBasisElement:
    """``X_{e_i - e_j}``, read as h_i when i == j (the matrix formula agrees)."""
    return H(i) if i == j else Xe(i, j)


_LABEL = re.compile(r"^\s*(Xp|Xm|Xe)\s*\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*$|^\s*h\s*\(\s*(\d+)\s*\)\s*$")


def parse_label(text: str, n: int | None = None) -> SpBasisElement:
    """Parse ``"Xp(1,2)"``, ``"Xm(2,2)"``, ``"Xe(1,2)"`` or ``"h(1)"``."""
    m = _LABEL.match(text)
    if not m:
        raise LabelError(f"bad basis label {text!r}")
    if m.group(4):
        b = H(int(m.group(4)) - 1)
    else:
        i, j = int(m.group(2)) - 1, int(m.group(3)) - 1
        if i < 0 or j < 0:
            raise LabelError(f"indices start at 1 in {text!r}")
        kind = m.group(1)
        if kind == "Xe" and i == j:
            raise LabelError(f"{text!r}: Xe needs distinct indices")
        b = {"Xp": Xp, "Xm": Xm, "Xe": Xe}[kind](i, j)
    if n is not None and b.max_index() >= n:
        raise LabelError(f"{text!r} out of range for n={n}")
    return b


def dimension(n: int) -> int:
    return n * (2 * n + 1)


@lru_cache(maxsize=None)
def basis(n: int) -> tuple[SpBasisElement, ...]:
    """The basis in a fixed order: h's, Xe's, Xp's, Xm's."""
    if n < 1:
        raise ValueError("rank must be positive")
    out = [H(i) for i in range(n)]
    out += [Xe(i, j) for i in range(n) for j in range(n) if i != j]
    out += [Xp(i, j) for i in range(n) for j in range(i, n)]
    out += [Xm(i, j) for i in range(n) for j in range(i, n)]
    return tuple(out)


# ---------------------------------------------------------------------------
# sparse matrices


class SpMatrix:
    """A sparse 2n x 2n matrix over Q(i)."""

    __slots__ = ("n", "entries")

    def __init__(self, n: int, entries: Mapping[tuple[int, int], object] | None = None) -> None:
        self.n = n
        clean = {}
        for (r, c), v in (entries or {}).items():
            if not (0 <= r < 2 * n and 0 <= c < 2 * n):
                raise IndexError(f"entry {(r, c)} outside a {2 * n}x{2 * n} matrix")
            v = as_scalar(v)
            if v:
                clean[(r, c)] = clean.get((r, c), ZERO) + v
        self.entries = {k: v for k, v in clean.items() if v}

    def __add__(self, other: SpMatrix) -> SpMatrix:
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, ZERO) + v
        return SpMatrix(self.n, out)

    def __neg__(self) -> SpMatrix:
        return SpMatrix(self.n, {k: -v for k, v in self.entries.items()})

    def __sub__(self, other: SpMatrix) -> SpMatrix:
        return self + (-other)

    def scale(self, c) -> SpMatrix:
        c = as_scalar(c)
        return SpMatrix(self.n, {k: v * c for k, v in self.entries.items()})

    def __matmul__(self, other: SpMatrix) -> SpMatrix:
        by_row: dict[int, list] = {}
        for (r, c), v in other.entries.items():
            by_row.setdefault(r, []).append((c, v))
        out: dict[tuple[int, int], GaussianRational] = {}
        for (r, k), v in self.entries.items():
            for c, w in by_row.get(k, ()):
                out[(r, c)] = out.get((r, c), ZERO) + v * w
        return SpMatrix(self.n, out)

    def commutator(self, other: SpMatrix) -> SpMatrix:
        return self @ other - other @ self

    def transpose(self) -> SpMatrix:
        return SpMatrix(self.n, {(c, r): v for (r, c), v in self.entries.items()})

    def is_symplectic(self) -> bool:
        """``S X == -X^T S``."""
        s = symplectic_form(self.n)
        return s @ self == -(self.transpose() @ s)

    def dense(self) -> list[list[GaussianRational]]:
        m = [[ZERO] * (2 * self.n) for _ in range(2 * self.n)]
        for (r, c), v in self.entries.items():
            m[r][c] = v
        return m

    def __eq__(self, other) -> bool:
        return isinstance(other, SpMatrix) and self.n == other.n and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.entries.items())))

    def __repr__(self) -> str:
        body = ", ".join(f"e{r + 1},{c + 1}: {format_scalar(v)}" for (r, c), v in sorted(self.entries.items()))
        return f"SpMatrix(n={self.n}, {{{body}}})"


@lru_cache(maxsize=None)
def symplectic_form(n: int) -> SpMatrix:
    ent = {}
    for i in range(n):
        ent[(i, n + i)] = 1
        ent[(n + i, i)] = -1
    return SpMatrix(n, ent)


def realize(b: SpBasisElement, n: int) -> SpMatrix:
    """The matrix of a basis element; note ``Xp(i,i) = 2 e_{i,n+i}``."""
    if b.max_index() >= n:
        raise IndexError(f"{b} out of range for n={n}")
    i, j = b.i, b.j
    ent: dict[tuple[int, int], int] = {}

    def add(r, c, v):
        ent[(r, c)] = ent.get((r, c), 0) + v

    if b.kind == "h":
        add(i, i, 1)
        add(n + i, n + i, -1)
    elif b.kind == "Xp":
        add(i, n + j, 1)
        add(j, n + i, 1)
    elif b.kind == "Xm":
        add(n + i, j, 1)
        add(n + j, i, 1)
    else:
        add(i, j, 1)
        add(n + j, n + i, -1)
    return SpMatrix(n, ent)


# ---------------------------------------------------------------------------
# linear combinations


class SpElement:
    """A finite linear combination of basis elements."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[SpBasisElement, object] | None = None) -> None:
        clean = {}
        for b, c in (coeffs or {}).items():
            c = as_scalar(c)
            if c:
                clean[b] = clean.get(b, ZERO) + c
        self.coeffs = {b: c for b, c in clean.items() if c}

    @classmethod
    def of(cls, b: SpBasisElement, c=1) -> SpElement:
        return cls({b: c})

    def __iter__(self) -> Iterator[tuple[SpBasisElement, GaussianRational]]:
        return iter(sorted(self.coeffs.items()))

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __add__(self, other) -> SpElement:
        other = _as_element(other)
        out = dict(self.coeffs)
        for b, c in other.coeffs.items():
            out[b] = out.get(b, ZERO) + c
        return SpElement(out)

    __radd__ = __add__

    def __neg__(self) -> SpElement:
        return SpElement({b: -c for b, c in self.coeffs.items()})

    def __sub__(self, other) -> SpElement:
        return self + (-_as_element(other))

    def __rsub__(self, other) -> SpElement:
        return _as_element(other) - self

    def scale(self, c) -> SpElement:
        c = as_scalar(c)
        return SpElement({b: v * c for b, v in self.coeffs.items()})

    def __mul__(self, c) -> SpElement:
        return self.scale(c)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, SpBasisElement):
            other = SpElement.of(other)
        if isinstance(other, SpElement):
            return self.coeffs == other.coeffs
        if other == 0:
            return not self.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self.coeffs.items()))

    def __repr__(self) -> str:
        return f"SpElement({self})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for b, c in self:
            parts.append(b.label if c == 1 else f"({format_scalar(c)})*{b.label}")
        return " + ".join(parts)


def _as_element(x) -> SpElement:
    if isinstance(x, SpElement):
        return x
    if isinstance(x, SpBasisElement):
        return SpElement.of(x)
    if x == 0:
        return SpElement()
    raise TypeError(f"cannot interpret {x!r} as an sp(2n) element")


def to_matrix(x, n: int) -> SpMatrix:
    x = _as_element(x)
    out = SpMatrix(n)
    for b, c in x.coeffs.items():
        out = out + realize(b, n).scale(c)
    return out


@lru_cache(maxsize=None)
def _left_inverse(n: int):
    """Pivot matrix positions and the inverse of the basis restricted to them."""
    bs = basis(n)
    positions = [(r, c) for r in range(2 * n) for c in range(2 * n)]
    cols = [realize(b, n) for b in bs]
    # rows of A^T are the flattened basis matrices; their pivots pick independent positions
    at = [[m.entries.get(p, ZERO) for p in positions] for m in cols]
    _, pivots = linalg.rref(at)
    if len(pivots) != len(bs):
        raise AssertionError("basis matrices are not linearly independent")
    chosen = [positions[p] for p in pivots]
    square = [[cols[k].entries.get(p, ZERO) for k in range(len(bs))] for p in chosen]
    inv = linalg.inverse(square)
    return chosen, inv


def coordinates(m: SpMatrix) -> SpElement:
    """Express a matrix of sp(2n) in the basis; raises if it is not in the span."""
    n = m.n
    chosen, inv = _left_inverse(n)
    vec = [m.entries.get(p, ZERO) for p in chosen]
    bs = basis(n)
    coeffs = {}
    for k, row in enumerate(inv):
        v = ZERO
        for a, x in zip(row, vec):
            if a and x:
                v = v + a * x
        if v:
            coeffs[bs[k]] = v
    out = SpElement(coeffs)
    if to_matrix(out, n) != m:
        raise ValueError("matrix is not in sp(2n)")
    return out


def bracket(x, y, n: int) -> SpElement:
    """Lie bracket computed from the matrix realization."""
    return coordinates(to_matrix(x, n).commutator(to_matrix(y, n)))


@lru_cache(maxsize=None)
def structure_constants(n: int) -> dict[tuple[SpBasisElement, SpBasisElement], SpElement]:
    """The full bracket table over the basis."""
    bs = basis(n)
    mats = {b: realize(b, n) for b in bs}
    return {(a, b): coordinates(mats[a].commutator(mats[b])) for a in bs for b in bs}


def table_bracket(x, y, n: int) -> SpElement:
    """Bilinear extension of :func:`structure_constants`."""
    table = structure_constants(n)
    x, y = _as_element(x), _as_element(y)
    out = SpElement()
    for a, ca in x.coeffs.items():
        for b, cb in y.coeffs.items():
            out = out + table[(a, b)].scale(ca * cb)
    return out


# ---------------------------------------------------------------------------
# closed-form suite


def _delta(a: int, b: int) -> int:
    return 1 if a == b else 0


def _combo(*pairs) -> SpElement:
    out = SpElement()
    for c, b in pairs:
        if c:
            out = out + SpElement.of(b, c)
    return out


def eq1_instances(n: int) -> Iterator[tuple[str, SpBasisElement, SpBasisElement, SpElement]]:
    """Every instance of the four closed-form bracket families."""
    idx = range(n)
    for i, j, k, l in itertools.product(idx, repeat=4):
        if i != j and k != l:
            yield "Xe,Xe", Xe(i, j), Xe(k, l), _combo((_delta(j, k), E(i, l)), (-_delta(l, i), E(k, j)))
        yield "Xp,Xm", Xp(i, j), Xm(k, l), _combo(
            (_delta(j, k), E(i, l)), (_delta(i, l), E(j, k)), (_delta(i, k), E(j, l)), (_delta(j, l), E(i, k))
        )
        if i != j:
            yield "Xe,Xp", Xe(i, j), Xp(k, l), _combo((_delta(j, k), Xp(i, l)), (_delta(j, l), Xp(i, k)))
            yield "Xe,Xm", Xe(i, j), Xm(k, l), _combo((-_delta(i, l), Xm(k, j)), (-_delta(k, i), Xm(l, j)))


@dataclass
class Eq1Report:
    n: int
    checked: dict[str, int] = field(default_factory=dict)
    mismatches: list[tuple[str, str, str, str, str]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches


def verify_eq1_suite(n: int) -> Eq1Report:
    """Compare every closed-form bracket instance with the matrix commutator."""
    if not 2 <= n <= 4:
        raise ValueError("the closed-form suite runs for 2 <= n <= 4")
    report = Eq1Report(n)
    for family, x, y, expected in eq1_instances(n):
        report.checked[family] = report.checked.get(family, 0) + 1
        got = bracket(x, y, n)
        if got != expected:
            report.mismatches.append((family, x.label, y.label, str(expected), str(got)))
    return report


def jacobi_violations(
    n: int, triples: Iterable[tuple[SpBasisElement, SpBasisElement, SpBasisElement]] | None = None
) -> list[tuple[SpBasisElement, SpBasisElement, SpBasisElement]]:
    """Basis triples (all of them by default) where the Jacobi identity fails."""
    bs = basis(n)
    if triples is None:
        triples = itertools.product(bs, repeat=3)
    bad = []
    for x, y, z in triples:
        total = (
            table_bracket(x, table_bracket(y, z, n), n)
            + table_bracket(y, table_bracket(z, x, n), n)
            + table_bracket(z, table_bracket(x, y, n), n)
        )
        if total:
            bad.append((x, y, z))
    return bad


def sample_triples(n: int, count: int, seed: int = 0):
    rng = random.Random(seed)
    bs = basis(n)
    return [tuple(rng.choice(bs) for _ in range(3)) for _ in range(count)]
