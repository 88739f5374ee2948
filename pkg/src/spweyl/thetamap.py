"""Homomorphisms U(sp_2n) -> D_n fixing X_{e_i+e_j} -> t_i t_j.

``build_theta(n, f)`` produces the family theta_f, the twist of theta_0 by the
automorphism ``sigma_f : t_i -> t_i, d_i -> d_i + d_i(f)``.  ``classify``
goes the other way: from candidate generator images it recovers ``f`` (up to
an additive constant) or reports which constraint fails.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .polyalg import LaurentMultiPoly, MultiPoly, exponents_up_to, parse_poly, solve_diagonal, InconsistentEquation
from .scalars import GaussianRational
from .sp2n import H, SpBasisElement, Xe, Xm, Xp, basis, parse_label, structure_constants
from .weyl import WeylElement, format_operator, parse_operator, weyl_apply, weyl_commutator

__all__ = [
    "GeneratorImages",
    "ThetaMap",
    "HomReport",
    "Shape",
    "ShapeViolation",
    "ShapePreconditionError",
    "Classification",
    "ClassificationError",
    "build_theta",
    "check_homomorphism",
    "sigma_twist",
    "extract_shape",
    "shape_images",
    "classify",
    "verify_power_identities",
]

HALF = GaussianRational(Fraction(1, 2))


@dataclass
class GeneratorImages:
    """Candidate images of every basis element of sp(2n) in D_n."""

    n: int
    images: dict[SpBasisElement, WeylElement]

    def image(self, x) -> WeylElement:
        """Linear extension of the images to an :class:`SpElement`."""
        if isinstance(x, SpBasisElement):
            return self.images[x]
        out = WeylElement.zero(self.n)
        for b, c in x.coeffs.items():
            out = out + self.images[b].scale(c)
        return out

    def to_json(self) -> str:
        return json.dumps(
            {"n": self.n, "images": {b.label: format_operator(w) for b, w in sorted(self.images.items())}},
            sort_keys=True,
            indent=2,
        )

    @classmethod
    def from_dict(cls, data: Mapping) -> GeneratorImages:
        n = int(data["n"])
        images = {}
        for label, text in data["images"].items():
            images[parse_label(label, n)] = parse_operator(text, n)
        return cls(n, images)

    @classmethod
    def from_json(cls, text: str) -> GeneratorImages:
        return cls.from_dict(json.loads(text))


@dataclass
class ThetaMap(GeneratorImages):
    f: MultiPoly = None  # type: ignore[assignment]


def _partials(n: int, f: MultiPoly) -> list[MultiPoly]:
    return [f.diff(i) for i in range(n)]


def build_theta(n: int, f: MultiPoly | str | None = None) -> ThetaMap:
    """The images of theta_f on the basis."""
    if f is None:
        f = MultiPoly.zero(n)
    elif isinstance(f, str):
        f = parse_poly(f, n)
    if f.nvars != n:
        raise ValueError(f"f has {f.nvars} variables, expected {n}")
    fd = _partials(n, f)
    t = [WeylElement.t(n, i) for i in range(n)]
    d = [WeylElement.d(n, i) for i in range(n)]
    tvar = [MultiPoly.variable(n, i) for i in range(n)]
    shifted = [WeylElement.from_poly(fd[i]) + d[i] for i in range(n)]
    images: dict[SpBasisElement, WeylElement] = {}
    for i in range(n):
        images[H(i)] = WeylElement.from_poly(tvar[i] * fd[i]) + t[i] * d[i] + HALF
        for j in range(n):
            if i != j:
                images[Xe(i, j)] = WeylElement.from_poly(tvar[i] * fd[j]) + t[i] * d[j]
            if i <= j:
                images[Xp(i, j)] = t[i] * t[j]
                images[Xm(i, j)] = -(shifted[i] * shifted[j])
    return ThetaMap(n, images, f)


@dataclass
class HomReport:
    pairs_checked: int = 0
    failures: list[tuple[SpBasisElement, SpBasisElement, str, str]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def failing_pairs(self) -> set[tuple[SpBasisElement, SpBasisElement]]:
        return {(x, y) for x, y, _, _ in self.failures}


def check_homomorphism(g: GeneratorImages) -> HomReport:
    """Check ``image([x, y]) == [image(x), image(y)]`` on all ordered basis pairs."""
    table = structure_constants(g.n)
    report = HomReport()
    for x in basis(g.n):
        for y in basis(g.n):
            report.pairs_checked += 1
            expected = g.image(table[(x, y)])
            got = weyl_commutator(g.images[x], g.images[y])
            if expected != got:
                report.failures.append((x, y, format_operator(expected), format_operator(got)))
    return report


def sigma_twist(f: MultiPoly, a: WeylElement) -> WeylElement:
    """Apply the automorphism ``t_i -> t_i, d_i -> d_i + d_i(f)``."""
    n = a.nvars
    if f.nvars != n:
        raise ValueError("f and the operator live in different rank")
    shifted = [WeylElement.from_poly(f.diff(i)) + WeylElement.d(n, i) for i in range(n)]
    powers: dict[tuple[int, int], WeylElement] = {}

    def power(i: int, k: int) -> WeylElement:
        if (i, k) not in powers:
            powers[(i, k)] = WeylElement.one(n) if k == 0 else power(i, k - 1) * shifted[i]
        return powers[(i, k)]

    out = WeylElement.zero(n)
    zero = (0,) * n
    for (alpha, beta), c in a.terms.items():
        term = WeylElement._from_clean(n, {(alpha, zero): c})
        for i, b in enumerate(beta):
            if b:
                term = term * power(i, b)
        out = out + term
    return out


# ---------------------------------------------------------------------------
# shape normal forms


class ShapeViolation(ValueError):
    pass


class ShapePreconditionError(ShapeViolation):
    """The images do not fix X_{e_i+e_j} -> t_i t_j (or some are missing)."""


@dataclass
class Shape:
    """``p[(i, j)]``, ``q[(i, j)]`` read off by acting on 1 (0-based keys)."""

    n: int
    p: dict[tuple[int, int], MultiPoly]
    q: dict[tuple[int, int], MultiPoly]


def _mult(p: MultiPoly) -> WeylElement:
    return WeylElement.from_poly(p)


def shape_operators(shape: Shape) -> dict[SpBasisElement, WeylElement]:
    """The normal-form operators determined by the p's and q's."""
    n = shape.n
    one = MultiPoly.one(n)
    t = lambda i: WeylElement.t(n, i)  # noqa: E731
    d = lambda i: WeylElement.d(n, i)  # noqa: E731
    tinv_d = lambda i: WeylElement.t(n, i, -1) * d(i)  # noqa: E731
    ops: dict[SpBasisElement, WeylElement] = {}
    for i in range(n):
        ops[H(i)] = _mult(shape.p[(i, i)]) + t(i) * d(i)
        ops[Xm(i, i)] = _mult(shape.q[(i, i)]) + _mult(one - shape.p[(i, i)] * 2) * tinv_d(i) - d(i) * d(i)
        for j in range(n):
            if i != j:
                ops[Xe(i, j)] = _mult(shape.p[(i, j)]) + t(i) * d(j)
            if i < j:
                ops[Xm(i, j)] = (
                    _mult(shape.q[(i, j)])
                    - _mult(shape.p[(i, j)]) * tinv_d(i)
                    - _mult(shape.p[(j, i)]) * tinv_d(j)
                    - d(i) * d(j)
                )
            if i <= j:
                ops[Xp(i, j)] = t(i) * t(j)
    return ops


def shape_images(n: int, p: Mapping, q: Mapping) -> GeneratorImages:
    """Generator images built from prescribed shape data (q symmetric)."""
    q = dict(q)
    for (i, j), v in list(q.items()):
        q.setdefault((j, i), v)
    return GeneratorImages(n, shape_operators(Shape(n, dict(p), q)))


def _simplify(p: MultiPoly) -> MultiPoly:
    if isinstance(p, LaurentMultiPoly) and p.is_polynomial():
        return p.to_polynomial()
    return p


def extract_shape(g: GeneratorImages, bound: int = 4) -> Shape:
    """Read off p, q and verify the normal forms on every ``t^{2m}``, ``|m| <= bound``."""
    n = g.n
    missing = [b.label for b in basis(n) if b not in g.images]
    if missing:
        raise ShapePreconditionError(f"missing images for {', '.join(missing)}")
    for i in range(n):
        for j in range(i, n):
            expected = WeylElement.t(n, i) * WeylElement.t(n, j)
            if g.images[Xp(i, j)] != expected:
                raise ShapePreconditionError(
                    f"precondition: image of {Xp(i, j).label} is {format_operator(g.images[Xp(i, j)])}, "
                    f"not {format_operator(expected)}"
                )
    one = LaurentMultiPoly.one(n)
    p, q = {}, {}
    for i in range(n):
        p[(i, i)] = _simplify(weyl_apply(g.images[H(i)], one))
        for j in range(n):
            if i != j:
                p[(i, j)] = _simplify(weyl_apply(g.images[Xe(i, j)], one))
            if i <= j:
                q[(i, j)] = q[(j, i)] = _simplify(weyl_apply(g.images[Xm(i, j)], one))
    for key, v in p.items():
        if isinstance(v, LaurentMultiPoly):
            raise ShapeViolation(f"p{key[0] + 1}{key[1] + 1} = {v} is not a polynomial")
    shape = Shape(n, p, q)
    ops = shape_operators(shape)
    for m in exponents_up_to(n, bound):
        v = LaurentMultiPoly.monomial(tuple(2 * x for x in m))
        for b in basis(n):
            if b.kind == "Xp":
                continue
            if weyl_apply(g.images[b], v) != weyl_apply(ops[b], v):
                raise ShapeViolation(f"shape violation: {b.label} on t^{tuple(2 * x for x in m)}")
    return shape


# ---------------------------------------------------------------------------
# classification


class ClassificationError(ValueError):
    """``reason`` is one of: 'not integrable', 'constants differ',
    'b != 1/2', 'p mismatch', 'q mismatch', 'image mismatch'."""

    def __init__(self, reason: str, detail: str) -> None:
        super().__init__(f"{reason}: {detail}")
        self.reason = reason


@dataclass
class Classification:
    f: MultiPoly
    b: GaussianRational
    shape: Shape


def _t(n: int, i: int) -> MultiPoly:
    return MultiPoly.variable(n, i)


def _euler(p: MultiPoly, i: int) -> MultiPoly:
    """``t_i d_i (p)``."""
    return _t(p.nvars, i).to_laurent() * p.diff(i) if isinstance(p, LaurentMultiPoly) else _t(p.nvars, i) * p.diff(i)


def _tinv(n: int, i: int) -> LaurentMultiPoly:
    e = [0] * n
    e[i] = -1
    return LaurentMultiPoly.monomial(e)


def classify(g: GeneratorImages, bound: int = 4) -> Classification:
    """Find ``f`` with zero constant term such that ``g`` equals theta_f."""
    n = g.n
    shape = extract_shape(g, bound)
    p, q = shape.p, shape.q

    for i in range(n):
        for j in range(n):
            if _euler(p[(j, j)], i) != _euler(p[(i, i)], j):
                raise ClassificationError(
                    "not integrable", f"t{i + 1} d{i + 1}(p{j + 1}{j + 1}) != t{j + 1} d{j + 1}(p{i + 1}{i + 1})"
                )

    consts = [p[(i, i)].constant_term() for i in range(n)]
    f_terms: dict[tuple[int, ...], GaussianRational] = {}
    for i in range(n):
        for m, c in (p[(i, i)] - consts[i]).terms.items():
            if not m[i]:
                raise ClassificationError("not integrable", f"p{i + 1}{i + 1} has a term {m} not divisible by t{i + 1}")
            v = c / m[i]
            if f_terms.setdefault(m, v) != v:
                raise ClassificationError("not integrable", f"monomial {m} of f is over-determined")
    f = MultiPoly(n, f_terms)
    fd = _partials(n, f)

    if any(c != consts[0] for c in consts):
        raise ClassificationError(
            "constants differ", "[X_{ei-ej}, X_{ej-ei}] = h_i - h_j forces equal constant terms of p_ii"
        )
    b = consts[0]
    if b != HALF:
        raise ClassificationError("b != 1/2", f"the constant term of p_ii is {b}, [X_{{ei-ej}}, X_{{-2ei}}] needs 1/2")

    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            rhs = _t(n, i) * p[(i, i)].diff(j)
            try:
                sol = solve_diagonal(i, -1, rhs)
            except InconsistentEquation as exc:
                raise ClassificationError("p mismatch", str(exc)) from None
            if not sol.in_kernel(p[(i, j)] - sol.solution):
                raise ClassificationError("p mismatch", f"(t_i d_i - 1)(p_ij) != t_i d_j(p_ii) for {(i + 1, j + 1)}")
            if p[(i, j)] != _t(n, i) * fd[j]:
                raise ClassificationError("p mismatch", f"p{i + 1}{j + 1} != t{i + 1} f_({j + 1})")

    for i in range(n):
        for j in range(n):
            if i == j:
                expected = -(fd[i] * fd[i]) - fd[i].diff(i) - (_tinv(n, i) * fd[i]).scale(2 * b - 1)
                if _simplify(expected.to_laurent()) != q[(i, i)]:
                    raise ClassificationError("q mismatch", f"q{i + 1}{i + 1} != -f_(i)^2 - d_i f_(i)")
                continue
            pii = p[(i, i)].to_laurent()
            rhs = (
                -(p[(i, j)].to_laurent() * _tinv(n, i) * pii.diff(i))
                - p[(j, i)].to_laurent() * _tinv(n, j) * pii.diff(j)
                - pii.diff(i).diff(j)
            )
            qij = q[(i, j)]
            if isinstance(qij, LaurentMultiPoly) or not rhs.is_polynomial():
                raise ClassificationError("q mismatch", f"q{i + 1}{j + 1} is not a polynomial")
            sol = solve_diagonal(i, 1, rhs.to_polynomial())
            if sol.solution != qij:
                raise ClassificationError("q mismatch", f"q{i + 1}{j + 1} does not solve (t_i d_i + 1) q_ij = rhs")
            if qij != -(fd[i] * fd[j]) - fd[i].diff(j):
                raise ClassificationError("q mismatch", f"q{i + 1}{j + 1} != -f_(i) f_(j) - d_j f_(i)")

    theta = build_theta(n, f)
    for bb in basis(n):
        if theta.images[bb] != g.images[bb]:
            raise ClassificationError("image mismatch", f"{bb.label} differs from theta_f off the even monomials")
    return Classification(f, b, shape)


# ---------------------------------------------------------------------------
# power-commutator identities


@dataclass
class PowerReport:
    checked: dict[str, int] = field(default_factory=dict)
    failures: list[tuple[str, tuple, int]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def verify_power_identities(n: int, f: MultiPoly | None = None, k_max: int = 4) -> PowerReport:
    """Check the three ``[X, X_{2e_l}^k]`` identities on theta_f images."""
    theta = build_theta(n, f)
    im = theta.images
    report = PowerReport()

    def record(name, ok, where):
        report.checked[name] = report.checked.get(name, 0) + 1
        if not ok:
            report.failures.append((name, where[:-1], where[-1]))

    for l in range(n):
        top = im[Xp(l, l)]
        pw = [WeylElement.one(n)]
        for _ in range(k_max):
            pw.append(pw[-1] * top)
        for k in range(1, k_max + 1):
            for i in range(n):
                for j in range(n):
                    if i == j:
                        continue
                    lhs = weyl_commutator(im[Xe(i, j)], pw[k])
                    rhs = (pw[k - 1] * im[Xp(i, j)]).scale(2 * k) if j == l else WeylElement.zero(n)
                    record("(1)", lhs == rhs, (i, j, l, k))

                    lhs = weyl_commutator(im[Xm(i, j)], pw[k])
                    inner = WeylElement.zero(n)
                    if j == l:
                        inner = inner + im[Xe(j, i)]
                    if i == l:
                        inner = inner + im[Xe(i, j)]
                    rhs = (pw[k - 1] * inner).scale(-2 * k)
                    record("(2)", lhs == rhs, (i, j, l, k))
                lhs = weyl_commutator(im[Xm(i, i)], pw[k])
                rhs = (pw[k - 1] * (im[H(i)] + (k - 1))).scale(-4 * k) if i == l else WeylElement.zero(n)
                record("(3)", lhs == rhs, (i, l, k))
    return report
