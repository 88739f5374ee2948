"""Whittaker vectors and the free U(h)-basis reduction on truncated carriers.

A type ``a`` asks for ``W_i v = a_i^2 v`` where ``W_i`` is the module's
Whittaker generator (see ``PolyModule.whittaker_sign``).  Everything is done
on the span of carrier monomials of degree at most ``D``; operators that
leave that span are refused rather than projected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .linalg import nullspace, rref, solve
from .polyalg import MultiPoly, compare_exponents, exponent_key, exponents_up_to
from .repmodules import PolyModule
from .scalars import ZERO, GaussianRational, as_scalar, format_scalar, parse_scalar_list
from .sp2n import H

__all__ = [
    "WhittakerType",
    "TruncatedSpace",
    "TruncationError",
    "NotNilpotentError",
    "ReductionStuck",
    "whittaker_vectors",
    "local_nilpotency",
    "ym_apply",
    "order_degree",
    "free_basis_reduction",
    "block_constraints",
]


class TruncationError(ValueError):
    pass


class NotNilpotentError(ValueError):
    pass


class ReductionStuck(ValueError):
    pass


@dataclass(frozen=True)
class WhittakerType:
    a: tuple[GaussianRational, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", tuple(as_scalar(x) for x in self.a))
        if any(not x for x in self.a):
            raise ValueError("a Whittaker type needs every a_i nonzero")

    @classmethod
    def parse(cls, text: str) -> WhittakerType:
        return cls(tuple(parse_scalar_list(text)))

    @property
    def n(self) -> int:
        return len(self.a)

    def phi(self, i: int) -> GaussianRational:
        """The eigenvalue ``a_i^2`` required of the i-th generator."""
        return self.a[i] * self.a[i]

    def __str__(self) -> str:
        return ",".join(format_scalar(x) for x in self.a)


def _coerce_type(M: PolyModule, a) -> WhittakerType:
    if isinstance(a, str):
        a = WhittakerType.parse(a)
    elif not isinstance(a, WhittakerType):
        a = WhittakerType(tuple(a))
    if a.n != M.n:
        raise ValueError(f"type has {a.n} entries, module rank is {M.n}")
    return a


def lowering(M: PolyModule, a: WhittakerType, i: int) -> Callable[[MultiPoly], MultiPoly]:
    phi = a.phi(i)
    return lambda v: M.apply_whittaker(i, v) - v.scale(phi)


class TruncatedSpace:
    """Carrier monomials of degree <= D as an ordered basis."""

    def __init__(self, M: PolyModule, degree: int) -> None:
        self.module = M
        self.degree = degree
        self.basis = M.monomials(degree)
        self.index = {m: k for k, m in enumerate(self.basis)}

    def __len__(self) -> int:
        return len(self.basis)

    def coordinates(self, v: MultiPoly, what: str = "vector") -> list[GaussianRational]:
        out = [ZERO] * len(self.basis)
        for m, c in v.terms.items():
            k = self.index.get(m)
            if k is None:
                raise TruncationError(f"truncation not invariant: {what} has the term {m} beyond degree {self.degree}")
            out[k] = c
        return out

    def vector(self, coords: Sequence) -> MultiPoly:
        return MultiPoly(self.module.n, {m: c for m, c in zip(self.basis, coords)}, self.module.var)

    def matrix(self, op: Callable[[MultiPoly], MultiPoly], name: str = "operator") -> list[list[GaussianRational]]:
        """Matrix of ``op`` (columns are images of basis monomials)."""
        cols = [self.coordinates(op(self.module.monomial(m)), f"{name} on {m}") for m in self.basis]
        return [list(row) for row in zip(*cols)]


@dataclass
class WhittakerResult:
    dim: int
    basis: list[MultiPoly]
    degree: int


def whittaker_vectors(M: PolyModule, a, degree: int) -> WhittakerResult:
    """Exact basis of ``{v : W_i v = a_i^2 v for all i}`` in the truncation."""
    a = _coerce_type(M, a)
    space = TruncatedSpace(M, degree)
    rows: list[list[GaussianRational]] = []
    for i in range(M.n):
        rows.extend(space.matrix(lowering(M, a, i), f"W_{i + 1} - a_{i + 1}^2"))
    kernel = nullspace(rows, len(space))
    if kernel:
        # canonical basis: reduce with the highest monomial as leading column
        order = sorted(range(len(space)), key=lambda k: exponent_key(space.basis[k]), reverse=True)
        red, _ = rref([[v[k] for k in order] for v in kernel])
        kernel = []
        for row in red:
            v = [ZERO] * len(space)
            for pos, k in enumerate(order):
                v[k] = row[pos]
            kernel.append(v)
    return WhittakerResult(len(kernel), [space.vector(v) for v in kernel], degree)


@dataclass
class NilpotencyReport:
    table: dict[tuple[tuple[int, ...], int], int] = field(default_factory=dict)
    certified: bool = True

    def to_dict(self) -> dict:
        return {f"{list(m)}:{i + 1}": k for (m, i), k in sorted(self.table.items())}


def local_nilpotency(M: PolyModule, a, degree: int) -> NilpotencyReport:
    """Minimal ``k`` with ``(W_i - a_i^2)^k v = 0`` for each monomial ``v`` and each ``i``."""
    a = _coerce_type(M, a)
    space = TruncatedSpace(M, degree)
    limit = len(space) + 1
    report = NilpotencyReport()
    for m in space.basis:
        for i in range(M.n):
            op = lowering(M, a, i)
            w, k = M.monomial(m), 0
            while w:
                space.coordinates(w, f"iterate of W_{i + 1} - a_{i + 1}^2")
                if k >= limit:
                    raise NotNilpotentError(f"not nilpotent within bound: {M.monomial(m)} under i = {i + 1}")
                w = op(w)
                k += 1
            report.table[(m, i)] = k
            if k > m[i] + 1:
                report.certified = False
    return report


def ym_apply(M: PolyModule, a, m: Sequence[int], v: MultiPoly) -> MultiPoly:
    """``Y^m v`` with ``Y_i = W_i - a_i^2``."""
    a = _coerce_type(M, a)
    for i, e in enumerate(m):
        op = lowering(M, a, i)
        for _ in range(e):
            if not v:
                return v
            v = op(v)
    return v


def h_power_apply(M: PolyModule, m: Sequence[int], v: MultiPoly) -> MultiPoly:
    for i, e in enumerate(m):
        for _ in range(e):
            v = M.act(H(i), v)
    return v


def order_degree(M: PolyModule, a, w: MultiPoly, bound: int) -> tuple[int, ...] | None:
    """The largest ``s`` (graded order, ``|s| <= bound``) with ``Y^s w != 0``.

    Returns None for ``w = 0``.  Raises ``ReductionStuck`` if some ``Y^s w``
    with ``|s| = bound + 1`` is still nonzero.
    """
    a = _coerce_type(M, a)
    if not w:
        return None
    ops = [lowering(M, a, i) for i in range(M.n)]
    zero = (0,) * M.n
    images = {zero: w}
    best = zero
    for s in exponents_up_to(M.n, bound + 1)[1:]:
        # Y^s = Y_i Y^(s - e_i); the factors commute
        i = next(k for k, e in enumerate(s) if e)
        parent = images.get(s[:i] + (s[i] - 1,) + s[i + 1:])
        if not parent:
            continue
        v = ops[i](parent)
        if v:
            if sum(s) > bound:
                raise ReductionStuck(f"reduction stuck: Y^{s} w != 0 beyond the search bound")
            images[s] = v
            best = s
    return best


@dataclass
class ReductionResult:
    expansion: dict[tuple[tuple[int, ...], int], GaussianRational]
    wh_basis: list[MultiPoly]
    steps: list[tuple[int, ...]]

    @property
    def coefficients(self) -> dict[tuple[int, ...], GaussianRational]:
        """Rank-one view ``{m: c}`` of ``w = sum c h^m v``."""
        if len(self.wh_basis) != 1:
            raise ValueError("coefficients view needs a one-dimensional Whittaker space")
        return {m: c for (m, _), c in self.expansion.items()}

    def reconstruct(self, M: PolyModule) -> MultiPoly:
        out = MultiPoly.zero(M.n, M.var)
        for (m, k), c in self.expansion.items():
            out = out + h_power_apply(M, m, self.wh_basis[k]).scale(c)
        return out


def free_basis_reduction(M: PolyModule, a, w: MultiPoly, degree: int) -> ReductionResult:
    """Write ``w = sum c_{m,k} h^m v_k`` over a basis ``v_k`` of Whittaker vectors.

    Each step takes the order-degree ``m`` of ``w``, finds the scalars with
    ``Y^m w = sum_k d_k Y^m h^m v_k`` and subtracts ``sum_k d_k h^m v_k``.
    The order-degree must strictly drop at every step.
    """
    a = _coerce_type(M, a)
    if w.degree() > degree:
        raise ValueError(f"w has degree {w.degree()} > {degree}")
    wh = whittaker_vectors(M, a, degree)
    if not wh.dim:
        raise ReductionStuck("reduction stuck: no Whittaker vectors in the truncation")
    w = MultiPoly(M.n, w.terms, M.var)
    space = TruncatedSpace(M, degree)
    expansion: dict[tuple[tuple[int, ...], int], GaussianRational] = {}
    steps: list[tuple[int, ...]] = []
    prev = None
    m = order_degree(M, a, w, degree)
    while m is not None:
        if prev is not None and compare_exponents(m, prev) >= 0:
            raise ReductionStuck(f"reduction stuck: order-degree did not drop ({prev} -> {m})")
        steps.append(m)
        lifted = [h_power_apply(M, m, v) for v in wh.basis]
        # columns: Y^m h^m v_k in truncation coordinates
        cols = [space.coordinates(ym_apply(M, a, m, u), "Y^m h^m v") for u in lifted]
        target = space.coordinates(ym_apply(M, a, m, w), "Y^m w")
        rows = [list(r) for r in zip(*cols)]
        d = solve(rows, target)
        if d is None or not any(d):
            raise ReductionStuck(f"reduction stuck: Y^{m} w is not in the span of Y^m h^m wh_a")
        for k, c in enumerate(d):
            if c:
                expansion[(m, k)] = expansion.get((m, k), ZERO) + c
                w = w - lifted[k].scale(c)
        prev = m
        m = order_degree(M, a, w, degree)
    expansion = {key: c for key, c in expansion.items() if c}
    return ReductionResult(expansion, wh.basis, steps)


# ---------------------------------------------------------------------------


@dataclass
class BlockReport:
    differences: bool
    last_half_integer: bool
    last_pair_sum: bool
    reasons: list[str]

    @property
    def passed(self) -> bool:
        return self.differences and self.last_half_integer and self.last_pair_sum


def _as_integer(x: GaussianRational) -> int | None:
    if x.im or x.re.denominator != 1:
        return None
    return x.re.numerator


def block_constraints(mu: Sequence) -> BlockReport:
    """Necessary conditions on a weight for a nonempty non-singular block.

    ``mu(h_i - h_{i+1})`` must be a nonnegative integer, ``mu(h_n)`` must lie
    in ``1/2 + Z`` and ``mu(h_{n-1} + h_n)`` must be an integer ``>= -2``.
    """
    mu = [as_scalar(x) for x in mu]
    n = len(mu)
    if n < 2:
        raise ValueError("need n >= 2")
    reasons = []
    diffs = True
    for i in range(n - 1):
        d = _as_integer(mu[i] - mu[i + 1])
        if d is None or d < 0:
            diffs = False
            reasons.append(f"mu(h_{i + 1} - h_{i + 2}) = {format_scalar(mu[i] - mu[i + 1])} is not in Z>=0")
    half = _as_integer(mu[-1] - Fraction(1, 2)) is not None
    if not half:
        reasons.append(f"mu(h_{n}) = {format_scalar(mu[-1])} is not in 1/2 + Z")
    s = _as_integer(mu[-2] + mu[-1])
    pair = s is not None and s >= -2
    if not pair:
        reasons.append(f"mu(h_{n - 1} + h_{n}) = {format_scalar(mu[-2] + mu[-1])} is not in Z>=-2")
    return BlockReport(diffs, half, pair, reasons)
