"""Concrete sp(2n)-modules on polynomial carriers.

Three families:

* ``nilsson_module``: C[h] with root vectors acting through the shifts
  ``sigma_i : h_i -> h_i - 1``.
* ``mb_module``: C[x] as a module over the even Weyl algebra (shifts
  ``tau_i : x_i -> x_i - 1``), pulled back to sp(2n) through theta_0.
* ``weil_module``: even polynomials in t with sp(2n) acting through theta_f.

Operators are either finite sums ``g -> sum A_s(x) g(x + s)`` (shift kind) or
Weyl elements acting by differentiation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .linalg import IncrementalSpan
from .polyalg import MultiPoly, exponent_key, exponents_up_to, parse_poly, shift_substitute
from .scalars import GaussianRational, I, ONE, as_scalar, parse_scalar_list
from .sp2n import H, SpBasisElement, SpElement, Xe, Xm, Xp, basis, structure_constants
from .thetamap import build_theta
from .weyl import WeylElement, weyl_apply

__all__ = [
    "ModuleOperator",
    "PolyModule",
    "ParityError",
    "nilsson_module",
    "mb_module",
    "mb_even_operator",
    "weil_module",
    "check_module_axioms",
    "check_even_weyl_action",
    "simplicity_closure",
    "pnf_iso_test",
    "AxiomReport",
    "SimplicityReport",
    "IsoResult",
]

HALF = GaussianRational(Fraction(1, 2))
Shift = tuple[int, ...]


class ParityError(ValueError):
    pass


class ModuleOperator:
    """Either ``{shift: multiplier}`` (shift kind) or a Weyl element."""

    __slots__ = ("n", "shifts", "weyl")

    def __init__(self, n: int, shifts: Mapping[Sequence[int], MultiPoly] | None = None, weyl: WeylElement | None = None):
        if (shifts is None) == (weyl is None):
            raise ValueError("give exactly one of shifts or weyl")
        self.n = n
        self.weyl = weyl
        if shifts is None:
            self.shifts = None
        else:
            self.shifts = {tuple(s): p for s, p in shifts.items() if p}

    @property
    def kind(self) -> str:
        return "weyl" if self.weyl is not None else "shift"

    @classmethod
    def shift_op(cls, multiplier: MultiPoly, shift: Sequence[int]) -> ModuleOperator:
        return cls(multiplier.nvars, {tuple(shift): multiplier})

    @classmethod
    def scalar(cls, n: int, c, var: str = "x") -> ModuleOperator:
        return cls(n, {(0,) * n: MultiPoly.constant(n, c, var)})

    def apply(self, g: MultiPoly) -> MultiPoly:
        if self.weyl is not None:
            return weyl_apply(self.weyl, g)
        out = MultiPoly.zero(g.nvars, g.var)
        for s, a in self.shifts.items():
            out = out + a * shift_substitute(g, s)
        return out

    __call__ = apply

    def compose(self, other: ModuleOperator) -> ModuleOperator:
        """``self o other`` (apply ``other`` first)."""
        if self.weyl is not None and other.weyl is not None:
            return ModuleOperator(self.n, weyl=self.weyl * other.weyl)
        if self.shifts is None or other.shifts is None:
            raise TypeError("cannot compose a shift operator with a differential one")
        out: dict[Shift, MultiPoly] = {}
        for s, a in self.shifts.items():
            for t, b in other.shifts.items():
                key = tuple(x + y for x, y in zip(s, t))
                term = a * shift_substitute(b, s)
                out[key] = out[key] + term if key in out else term
        return ModuleOperator(self.n, out)

    def __matmul__(self, other: ModuleOperator) -> ModuleOperator:
        return self.compose(other)

    def __add__(self, other: ModuleOperator) -> ModuleOperator:
        if self.weyl is not None and other.weyl is not None:
            return ModuleOperator(self.n, weyl=self.weyl + other.weyl)
        if self.shifts is None or other.shifts is None:
            raise TypeError("cannot add a shift operator to a differential one")
        out = dict(self.shifts)
        for s, p in other.shifts.items():
            out[s] = out[s] + p if s in out else p
        return ModuleOperator(self.n, out)

    def scale(self, c) -> ModuleOperator:
        if self.weyl is not None:
            return ModuleOperator(self.n, weyl=self.weyl.scale(c))
        return ModuleOperator(self.n, {s: p.scale(c) for s, p in self.shifts.items()})

    def __neg__(self) -> ModuleOperator:
        return self.scale(-1)

    def __sub__(self, other: ModuleOperator) -> ModuleOperator:
        return self + (-other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModuleOperator):
            return NotImplemented
        return self.weyl == other.weyl and self.shifts == other.shifts

    def __repr__(self) -> str:
        if self.weyl is not None:
            return f"ModuleOperator(weyl={self.weyl})"
        body = ", ".join(f"{s}: {p}" for s, p in sorted(self.shifts.items()))
        return f"ModuleOperator({{{body}}})"


@dataclass
class PolyModule:
    """A polynomial carrier with an sp(2n) action on the basis.

    ``whittaker_sign`` picks the operator read as the Whittaker lowering
    generator: +1 uses X_{-2e_i} itself, -1 uses ``d_i^2 = -X_{-2e_i}``
    (the even-Weyl reading used for M_b).  ``cartan_offset`` is ``c`` when
    ``h_i`` acts as multiplication by ``x_i + c`` (rank one over U(h)).
    """

    name: str
    n: int
    carrier: str
    var: str
    action: dict[SpBasisElement, ModuleOperator]
    whittaker_sign: int = 1
    natural_type: tuple[GaussianRational, ...] | None = None
    cartan_offset: GaussianRational | None = None
    params: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def monomials(self, degree: int) -> list[tuple[int, ...]]:
        return exponents_up_to(self.n, degree, even=self.carrier == "even")

    def monomial(self, m: Sequence[int], c=1) -> MultiPoly:
        return MultiPoly.monomial(tuple(m), c, self.var)

    def one(self) -> MultiPoly:
        return MultiPoly.one(self.n, self.var)

    def in_carrier(self, v: MultiPoly) -> bool:
        return self.carrier != "even" or v.is_even()

    def act_monomial(self, b: SpBasisElement, m: tuple[int, ...]) -> MultiPoly:
        key = (b, m)
        out = self._cache.get(key)
        if out is None:
            out = self.action[b].apply(self.monomial(m))
            self._cache[key] = out
        return out

    def act(self, x: SpBasisElement | SpElement, v: MultiPoly) -> MultiPoly:
        if isinstance(x, SpBasisElement):
            items: Iterable = [(x, ONE)]
        else:
            items = x.coeffs.items()
        out = MultiPoly.zero(self.n, self.var)
        for b, c in items:
            for m, cv in v.terms.items():
                out = out + self.act_monomial(b, m).scale(c * cv)
        return out

    def whittaker_operator(self, i: int) -> ModuleOperator:
        op = self.action[Xm(i, i)]
        return op if self.whittaker_sign == 1 else -op

    def apply_whittaker(self, i: int, v: MultiPoly) -> MultiPoly:
        w = self.act(Xm(i, i), v)
        return w if self.whittaker_sign == 1 else -w


def _unit(n: int, i: int, k: int = 1) -> list[int]:
    e = [0] * n
    e[i] = k
    return e


def _add(*vs: Sequence[int]) -> Shift:
    return tuple(sum(x) for x in zip(*vs))


def nilsson_module(n: int) -> PolyModule:
    """C[h_1..h_n] with root vectors acting through h-shifts."""
    if n < 2:
        raise ValueError("n must be at least 2")
    h = [MultiPoly.variable(n, i, "h") for i in range(n)]
    one = MultiPoly.one(n, "h")
    zero = (0,) * n
    act: dict[SpBasisElement, ModuleOperator] = {}
    for i in range(n):
        act[H(i)] = ModuleOperator(n, {zero: h[i]})
        act[Xp(i, i)] = ModuleOperator(n, {tuple(_unit(n, i, -2)): (h[i] - HALF) * (h[i] - Fraction(3, 2))})
        act[Xm(i, i)] = ModuleOperator(n, {tuple(_unit(n, i, 2)): -one})
        for j in range(n):
            if i == j:
                continue
            ei, ej = _unit(n, i), _unit(n, j)
            act[Xe(i, j)] = ModuleOperator(n, {_add([-x for x in ei], ej): h[i] - HALF})
            if i < j:
                act[Xp(i, j)] = ModuleOperator(n, {_add([-x for x in ei], [-x for x in ej]): (h[i] - HALF) * (h[j] - HALF)})
                act[Xm(i, j)] = ModuleOperator(n, {_add(ei, ej): -one})
    return PolyModule("nilsson", n, "full", "h", act, 1, (I,) * n, GaussianRational(0), {})


T2_VARIANTS = ("corrected", "literal", "flipped")


def _check_b(b: Sequence) -> tuple[GaussianRational, ...]:
    b = tuple(as_scalar(x) for x in b)
    if any(not x for x in b):
        raise ValueError("every b_i must be nonzero")
    return b


def mb_even_operator(n: int, b: Sequence, alpha: Sequence[int], beta: Sequence[int], t2: str = "corrected") -> ModuleOperator:
    """The M_b operator for a quadratic even Weyl monomial ``t^alpha d^beta``.

    ``t2`` selects the ``t_i^2`` rule: ``corrected`` is
    ``b_i^-2 (x_i^2 - x_i) tau_i^2``; ``literal`` is
    ``b_i^-2 x_i tau_i^2 - x_i``; ``flipped`` is ``literal`` with ``+x_i``.
    """
    b = _check_b(b)
    x = [MultiPoly.variable(n, i, "x") for i in range(n)]
    one = MultiPoly.one(n, "x")
    ts = [i for i in range(n) for _ in range(alpha[i])]
    ds = [i for i in range(n) for _ in range(beta[i])]
    if len(ts) + len(ds) != 2:
        raise ValueError("only quadratic monomials are generators")
    if len(ds) == 2:
        i, j = ds
        return ModuleOperator(n, {_add(_unit(n, i), _unit(n, j)): one.scale(b[i] * b[j])})
    if len(ts) == 1:
        (i,), (j,) = ts, ds
        if i == j:
            return ModuleOperator(n, {(0,) * n: x[i]})
        return ModuleOperator(n, {_add(_unit(n, i, -1), _unit(n, j)): x[i].scale(b[i].inverse() * b[j])})
    i, j = ts
    if i != j:
        return ModuleOperator(n, {_add(_unit(n, i, -1), _unit(n, j, -1)): (x[i] * x[j]).scale((b[i] * b[j]).inverse())})
    binv2 = (b[i] * b[i]).inverse()
    down = tuple(_unit(n, i, -2))
    if t2 == "corrected":
        return ModuleOperator(n, {down: (x[i] * x[i] - x[i]).scale(binv2)})
    if t2 == "literal":
        return ModuleOperator(n, {down: x[i].scale(binv2), (0,) * n: -x[i]})
    if t2 == "flipped":
        return ModuleOperator(n, {down: x[i].scale(binv2), (0,) * n: x[i]})
    raise ValueError(f"unknown t^2 variant {t2!r}")


def mb_module(n: int, b: Sequence | str, t2: str = "corrected") -> PolyModule:
    """C[x_1..x_n] with the even Weyl action pulled back through theta_0."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if isinstance(b, str):
        b = parse_scalar_list(b)
    b = _check_b(b)
    if len(b) != n:
        raise ValueError(f"expected {n} values of b, got {len(b)}")

    def gen(ts: Sequence[int], ds: Sequence[int]) -> ModuleOperator:
        alpha, beta = [0] * n, [0] * n
        for i in ts:
            alpha[i] += 1
        for i in ds:
            beta[i] += 1
        return mb_even_operator(n, b, alpha, beta, t2)

    act: dict[SpBasisElement, ModuleOperator] = {}
    for i in range(n):
        act[H(i)] = gen([i], [i]) + ModuleOperator.scalar(n, HALF)
        for j in range(n):
            if i != j:
                act[Xe(i, j)] = gen([i], [j])
            if i <= j:
                act[Xp(i, j)] = gen([i, j], [])
                act[Xm(i, j)] = -gen([], [i, j])
    return PolyModule("mb", n, "full", "x", act, -1, b, HALF, {"b": b, "t2": t2})


def weil_module(n: int, f: MultiPoly | str | None = None) -> PolyModule:
    """Even polynomials in t with sp(2n) acting through theta_f."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if f is None:
        f = MultiPoly.zero(n)
    elif isinstance(f, str):
        f = parse_poly(f, n)
    if not f.is_even():
        raise ParityError(f"f = {f} has terms of odd degree; the action would not preserve even polynomials")
    theta = build_theta(n, f)
    act = {b: ModuleOperator(n, weyl=w) for b, w in theta.images.items()}
    return PolyModule("weil", n, "even", "t", act, 1, None, None, {"f": f})


# ---------------------------------------------------------------------------
# axioms


@dataclass
class AxiomReport:
    pairs_checked: int = 0
    cells_checked: int = 0
    max_degree: int = 0
    failures: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "pairs_checked": self.pairs_checked,
            "cells_checked": self.cells_checked,
            "max_degree": self.max_degree,
            "failures": self.failures,
        }


def check_module_axioms(M: PolyModule, degree: int, pairs: Iterable | None = None) -> AxiomReport:
    """``[x, y] v = x(y v) - y(x v)`` for all ordered basis pairs and monomials of degree <= ``degree``."""
    if degree < 2:
        raise ValueError("degree bound must be at least 2")
    table = structure_constants(M.n)
    if pairs is None:
        pairs = [(x, y) for x in basis(M.n) for y in basis(M.n)]
    report = AxiomReport()
    monos = M.monomials(degree)

    def act(b: SpBasisElement, m: tuple[int, ...]) -> MultiPoly:
        out = M.act_monomial(b, m)
        if not M.in_carrier(out):
            raise ParityError(f"{b.label} maps {m} outside the carrier")
        return out

    for x, y in pairs:
        report.pairs_checked += 1
        br = table[(x, y)]
        for m in monos:
            report.cells_checked += 1
            yv, xv = act(y, m), act(x, m)
            rhs = M.act(x, yv) - M.act(y, xv)
            lhs = M.act(br, M.monomial(m))
            report.max_degree = max(report.max_degree, rhs.degree(), lhs.degree(), yv.degree(), xv.degree())
            if lhs != rhs:
                report.failures.append({"x": x.label, "y": y.label, "v": str(M.monomial(m)), "difference": str(lhs - rhs)})
    return report


def _even_factorizations(n: int, alpha: Sequence[int], beta: Sequence[int]) -> set[tuple]:
    """All ways to write ``t^alpha d^beta`` as a product of quadratic normal-ordered factors."""
    ts = [i for i in range(n) for _ in range(alpha[i])]
    ds = [i for i in range(n) for _ in range(beta[i])]
    out = set()
    for tp in set(itertools.permutations(ts)):
        for dp in set(itertools.permutations(ds)):
            word = [("t", i) for i in tp] + [("d", i) for i in dp]
            out.add(tuple(tuple(word[k:k + 2]) for k in range(0, len(word), 2)))
    return out


def _factor_exponents(n: int, pair) -> tuple[list[int], list[int]]:
    alpha, beta = [0] * n, [0] * n
    for kind, i in pair:
        (alpha if kind == "t" else beta)[i] += 1
    return alpha, beta


def check_even_weyl_action(n: int, b: Sequence, max_order: int = 4, t2: str = "corrected") -> list[str]:
    """Well-definedness of the M_b even-Weyl action on normal-ordered monomials.

    Every factorization of ``t^alpha d^beta`` (``|alpha| + |beta|`` even and
    ``<= max_order``) into quadratic factors must give the same operator.
    Products of two quadratic generators must also agree with the operator
    of their normal-ordered expansion.  Returns the list of discrepancies.
    """
    b = _check_b(b)
    problems: list[str] = []
    canonical: dict[tuple, ModuleOperator] = {}
    for order in range(2, max_order + 1, 2):
        for total in itertools.product(range(order + 1), repeat=2 * n):
            if sum(total) != order:
                continue
            alpha, beta = list(total[:n]), list(total[n:])
            ops = []
            for fac in sorted(_even_factorizations(n, alpha, beta)):
                op = None
                for pair in fac:
                    g = mb_even_operator(n, b, *_factor_exponents(n, pair), t2)
                    op = g if op is None else op @ g
                ops.append((fac, op))
            first = ops[0][1]
            for fac, op in ops[1:]:
                if op != first:
                    problems.append(f"t^{alpha} d^{beta}: factorization {fac} differs")
            canonical[(tuple(alpha), tuple(beta))] = first

    def op_of(w: WeylElement) -> ModuleOperator:
        out = ModuleOperator(n, {})
        for (alpha, beta), c in w.terms.items():
            if not any(alpha) and not any(beta):
                out = out + ModuleOperator.scalar(n, c)
            else:
                out = out + canonical[(alpha, beta)].scale(c)
        return out

    gens = [k for k in canonical if sum(k[0]) + sum(k[1]) == 2]
    for k1 in gens:
        for k2 in gens:
            w = WeylElement.monomial(*k1) * WeylElement.monomial(*k2)
            if canonical[k1] @ canonical[k2] != op_of(w):
                problems.append(f"t^{list(k1[0])} d^{list(k1[1])} * t^{list(k2[0])} d^{list(k2[1])} disagrees with its normal form")
    return problems


# ---------------------------------------------------------------------------
# simplicity


@dataclass
class SimplicityReport:
    monomials_checked: int = 0
    stuck: list[str] = field(default_factory=list)
    generated_dim: int = 0
    expected_dim: int = 0
    missing: list[str] = field(default_factory=list)
    lowering: str = ""

    @property
    def passed(self) -> bool:
        return not self.stuck and not self.missing

    def to_dict(self) -> dict:
        return {
            "monomials_checked": self.monomials_checked,
            "lowering": self.lowering,
            "stuck": self.stuck,
            "generated_dim": self.generated_dim,
            "expected_dim": self.expected_dim,
            "missing": self.missing,
        }


def _closure(seed: MultiPoly, ops: list, cap: int, target=None) -> IncrementalSpan:
    """Span of everything reachable from ``seed`` through ``ops`` without exceeding degree ``cap``."""
    span = IncrementalSpan()
    queue = []
    if span.add(seed.terms, exponent_key):
        queue.append(seed)
    while queue:
        v = queue.pop()
        for op in ops:
            w = op(v)
            if not w or w.degree() > cap:
                continue
            if span.add(w.terms, exponent_key):
                queue.append(w)
                if target is not None and span.contains(target):
                    return span
    return span


def _even_mult(M: PolyModule, g: MultiPoly) -> WeylElement:
    """Multiplication by an even polynomial as a combination of X_{e_k+e_l} images."""
    out = WeylElement.zero(M.n)
    for m, c in g.terms.items():
        idx = [i for i in range(M.n) for _ in range(m[i])]
        term = WeylElement.constant(M.n, c)
        for k in range(0, len(idx), 2):
            term = term * M.action[Xp(idx[k], idx[k + 1])].weyl
        out = out + term
    return out


def _odd_split(p: MultiPoly) -> dict[int, MultiPoly]:
    """Write an odd polynomial as ``sum_k t_k g_k`` with every ``g_k`` even."""
    parts: dict[int, dict] = {}
    for m, c in p.terms.items():
        k = next(i for i, e in enumerate(m) if e)
        e = list(m)
        e[k] -= 1
        parts.setdefault(k, {})[tuple(e)] = c
    return {k: MultiPoly(p.nvars, t) for k, t in parts.items()}


def weil_second_derivatives(M: PolyModule) -> dict[tuple[int, int], WeylElement]:
    """``d_i d_j`` rebuilt from theta_f images, so it acts inside every submodule.

    Raises ``AssertionError`` if the rebuilt element is not ``d_i d_j``.
    """
    n, f = M.n, M.params["f"]
    fd = [f.diff(i) for i in range(n)]
    im = {b: op.weyl for b, op in M.action.items()}

    def td(k: int, j: int) -> WeylElement:
        base = im[H(k)] - HALF if k == j else im[Xe(k, j)]
        return base - _even_mult(M, MultiPoly.variable(n, k) * fd[j])

    out = {}
    for i in range(n):
        for j in range(i, n):
            w = -im[Xm(i, j)] - _even_mult(M, fd[i] * fd[j] + fd[j].diff(i))
            for a, c in ((i, j), (j, i)):
                for k, g in _odd_split(fd[a]).items():
                    w = w - _even_mult(M, g) * td(k, c)
            if w != WeylElement.d(n, i) * WeylElement.d(n, j):
                raise AssertionError(f"could not express d{i + 1} d{j + 1} through the action")
            out[(i, j)] = w
    return out


def lowering_operators(M: PolyModule) -> tuple[list, str]:
    n = M.n
    if M.name == "weil":
        dd = weil_second_derivatives(M)
        return [lambda v, w=w: weyl_apply(w, v) for w in dd.values()], "d_i d_j through theta_f images"
    if M.natural_type is None:
        raise ValueError(f"no lowering operators are defined for {M.name}")
    ops = []
    for i in range(n):
        a2 = M.natural_type[i] * M.natural_type[i]
        ops.append(lambda v, i=i, a2=a2: M.apply_whittaker(i, v) - v.scale(a2))
    label = "d_i^2 - b_i^2" if M.whittaker_sign == -1 else "X_{-2e_i} - a_i^2"
    return ops, label


def simplicity_closure(M: PolyModule, degree: int) -> SimplicityReport:
    """Desk-scale simplicity certificate.

    Every monomial of degree <= ``degree`` must reach the constant 1 through
    the family's lowering operators, and 1 must generate every monomial of
    degree <= ``degree`` under the basis actions.
    """
    report = SimplicityReport()
    ops, report.lowering = lowering_operators(M)
    one = M.one()
    for m in M.monomials(degree):
        report.monomials_checked += 1
        v = M.monomial(m)
        span = _closure(v, ops, sum(m), target=one.terms)
        if not span.contains(one.terms):
            report.stuck.append(f"not reached: {v}")
    if M.name == "weil":
        # the X_{e_i+e_j} images are t_i t_j whatever f is
        raising = [M.action[b].apply for b in basis(M.n) if b.kind == "Xp"]
    else:
        raising = [M.action[b].apply for b in basis(M.n)]
    span = _closure(one, raising, degree)
    monos = M.monomials(degree)
    report.expected_dim = len(monos)
    report.generated_dim = len(span)
    for m in monos:
        if not span.contains({m: ONE}):
            report.missing.append(str(M.monomial(m)))
    return report


# ---------------------------------------------------------------------------
# isomorphism of the P_n^f


@dataclass
class IsoResult:
    isomorphic: bool
    images_equal: bool

    @property
    def consistent(self) -> bool:
        return self.isomorphic == self.images_equal


def pnf_iso_test(f: MultiPoly | str, g: MultiPoly | str, n: int | None = None) -> IsoResult:
    """``P_n^f`` and ``P_n^g`` are isomorphic iff ``f - g`` is constant.

    ``images_equal`` records whether the theta images coincide, which makes
    the identity map an isomorphism.
    """
    if isinstance(f, str):
        f = parse_poly(f, n)
    if isinstance(g, str):
        g = parse_poly(g, n if n is not None else f.nvars)
    if f.nvars != g.nvars:
        raise ValueError("f and g have different numbers of variables")
    for p in (f, g):
        if not p.is_even():
            raise ParityError(f"{p} is not an even polynomial")
    iso = (f - g).is_constant()
    n = f.nvars
    same = build_theta(n, f).images == build_theta(n, g).images
    return IsoResult(iso, same)
