"""Weighting of modules that are free of rank one over U(h).

If ``h_i`` acts as multiplication by ``x_i + c`` the fiber ``M / I_gamma M``
is one-dimensional, realized by evaluating at ``x = gamma - c``.  A shift
operator ``g -> sum_s A_s(x) g(x + s)`` for a root vector of root ``alpha``
has every ``s = -alpha``, so it induces the scalar
``sum_s A_s(gamma + alpha - c)`` from the fiber at ``gamma`` to the fiber at
``gamma + alpha``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .linalg import rank
from .polyalg import MultiPoly
from .repmodules import PolyModule
from .scalars import ZERO, GaussianRational, as_scalar, format_scalar
from .sp2n import H, SpBasisElement, SpElement, Xm, Xp, basis, structure_constants

__all__ = [
    "NotRankOne",
    "EvaluationFiber",
    "weighting_fiber",
    "fiber_dimension",
    "weighting_support",
    "lattice_points",
    "sample_lattice",
    "check_eq33_compatibility",
]

HALF = GaussianRational(Fraction(1, 2))
Weight = tuple[GaussianRational, ...]


class NotRankOne(ValueError):
    pass


def _check_rank_one(M: PolyModule) -> None:
    if M.cartan_offset is None:
        raise NotRankOne(f"not U(h)-rank-one: {M.name} has no Cartan offset")
    c = M.cartan_offset
    for b in basis(M.n):
        op = M.action[b]
        if op.shifts is None:
            raise NotRankOne(f"not U(h)-rank-one: {b.label} acts by a differential operator")
        target = tuple(-r for r in b.root(M.n))
        if any(s != target for s in op.shifts):
            raise NotRankOne(f"not U(h)-rank-one: {b.label} has a shift other than {target}")
    for i in range(M.n):
        expected = MultiPoly.variable(M.n, i, M.var) + c
        if M.action[H(i)].shifts != {(0,) * M.n: expected}:
            raise NotRankOne(f"not U(h)-rank-one: h_{i + 1} is not x_{i + 1} + {format_scalar(c)}")


def _weight(gamma: Sequence) -> Weight:
    return tuple(as_scalar(g) for g in gamma)


@dataclass
class EvaluationFiber:
    """The fiber at ``gamma`` and the scalars of every basis element leaving it."""

    gamma: Weight
    dim: int
    action: dict[SpBasisElement, tuple[GaussianRational, Weight]]

    def scalar(self, b: SpBasisElement) -> GaussianRational:
        return self.action[b][0]

    def target(self, b: SpBasisElement) -> Weight:
        return self.action[b][1]


def _transition(M: PolyModule, b: SpBasisElement, gamma: Weight) -> tuple[GaussianRational, Weight]:
    alpha = b.root(M.n)
    target = tuple(g + a for g, a in zip(gamma, alpha))
    point = [t - M.cartan_offset for t in target]
    total = ZERO
    for a_s in M.action[b].shifts.values():
        total = total + a_s.evaluate(point)
    return total, target


def fiber_dimension(M: PolyModule, gamma: Sequence, degree: int = 3) -> int:
    """``dim`` of the truncated quotient ``M_{<=D} / (h - gamma) M_{<=D-1}``."""
    gamma = _weight(gamma)
    monos = M.monomials(degree)
    index = {m: k for k, m in enumerate(monos)}
    rows = []
    for m in M.monomials(degree - 1):
        for i in range(M.n):
            v = M.act(H(i), M.monomial(m)) - M.monomial(m).scale(gamma[i])
            row = [ZERO] * len(monos)
            for e, c in v.terms.items():
                row[index[e]] = c
            rows.append(row)
    return len(monos) - rank(rows)


def weighting_fiber(M: PolyModule, gamma: Sequence, degree: int = 3) -> EvaluationFiber:
    _check_rank_one(M)
    gamma = _weight(gamma)
    if len(gamma) != M.n:
        raise ValueError("gamma has the wrong length")
    action = {b: _transition(M, b, gamma) for b in basis(M.n)}
    return EvaluationFiber(gamma, fiber_dimension(M, gamma, degree), action)


def lattice_points(n: int, radius: int) -> list[Weight]:
    """``-(1/2)(1,...,1) + k`` for ``k`` in ``[-R, R]^n``."""
    pts: list[Weight] = [()]
    for _ in range(n):
        pts = [p + (GaussianRational(k) - HALF,) for p in pts for k in range(-radius, radius + 1)]
    return pts


def weighting_support(M: PolyModule, radius: int, degree: int = 3) -> dict[Weight, int]:
    """Nonzero fiber dimensions over the lattice box."""
    _check_rank_one(M)
    out = {}
    for g in lattice_points(M.n, radius):
        d = fiber_dimension(M, g, degree)
        if d:
            out[g] = d
    return out


def sample_lattice(n: int, count: int, radius: int = 3, seed: int = 0) -> list[Weight]:
    rng = random.Random(seed)
    return [tuple(GaussianRational(rng.randint(-radius, radius)) - HALF for _ in range(n)) for _ in range(count)]


@dataclass
class CompatibilityReport:
    samples: int = 0
    pairs_checked: int = 0
    failures: list[dict] = field(default_factory=list)
    cartan_check: list[bool] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures and all(self.cartan_check)


def _element_scalar(M: PolyModule, x: SpElement, gamma: Weight) -> GaussianRational:
    total = ZERO
    for b, c in x.coeffs.items():
        total = total + c * _transition(M, b, gamma)[0]
    return total


def check_eq33_compatibility(M: PolyModule, samples: Iterable[Sequence] | int = 20, seed: int = 0) -> CompatibilityReport:
    """Fiber-level bracket compatibility at each sampled weight.

    For every basis pair the composite ``x o y - y o x`` from ``gamma`` must
    equal the fiber scalar of ``[x, y]``; the pair ``(X_{2e_1}, X_{-2e_1})``
    must in addition give ``4 gamma_1``.
    """
    _check_rank_one(M)
    if isinstance(samples, int):
        samples = sample_lattice(M.n, samples, seed=seed)
    table = structure_constants(M.n)
    report = CompatibilityReport()
    els = basis(M.n)
    for gamma in samples:
        gamma = _weight(gamma)
        report.samples += 1
        out = {b: _transition(M, b, gamma) for b in els}
        for x in els:
            for y in els:
                report.pairs_checked += 1
                sy, gy = out[y]
                sx, gx = out[x]
                left = _transition(M, x, gy)[0] * sy - _transition(M, y, gx)[0] * sx
                right = _element_scalar(M, table[(x, y)], gamma)
                if left != right:
                    report.failures.append(
                        {"gamma": [format_scalar(g) for g in gamma], "x": x.label, "y": y.label,
                         "composite": format_scalar(left), "bracket": format_scalar(right)}
                    )
        x, y = Xp(0, 0), Xm(0, 0)
        sy, gy = out[y]
        left = _transition(M, x, gy)[0] * sy - _transition(M, y, out[x][1])[0] * out[x][0]
        report.cartan_check.append(left == gamma[0] * 4)
    return report
