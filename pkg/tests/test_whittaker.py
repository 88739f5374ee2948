from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from spweyl.polyalg import MultiPoly, compare_exponents, exponents_up_to, parse_poly
from spweyl.repmodules import mb_module, nilsson_module
from spweyl.scalars import as_scalar, parse_scalar
from spweyl.whittaker import (
    NotNilpotentError,
    ReductionStuck,
    TruncatedSpace,
    TruncationError,
    WhittakerType,
    block_constraints,
    free_basis_reduction,
    h_power_apply,
    local_nilpotency,
    order_degree,
    whittaker_vectors,
    ym_apply,
)
from spweyl.sp2n import Xp

from conftest import scalars, sym_scalar

X = lambda text, n=2: parse_poly(text, n).with_var("x")  # noqa: E731


def _sympy_kernel_dim(M, a, degree):
    # oracle: sympy nullspace of the stacked (W_i - a_i^2) matrices
    monos = M.monomials(degree)
    index = {m: k for k, m in enumerate(monos)}
    rows = []
    for i in range(M.n):
        a2 = sym_scalar(as_scalar(a[i])) ** 2
        block = sympy.zeros(len(monos), len(monos))
        for col, m in enumerate(monos):
            v = M.monomial(m)
            img = M.apply_whittaker(i, v)
            for e, c in img.terms.items():
                block[index[e], col] += sym_scalar(c)
            block[col, col] -= a2
        rows.append(block)
    return len(sympy.Matrix.vstack(*rows).nullspace())


# ---------------------------------------------------------------------------
# types


def test_type_parse_and_phi():
    a = WhittakerType.parse("2, i")
    assert a.n == 2 and a.phi(1) == -1 and str(a) == "2,i"
    with pytest.raises(ValueError):
        WhittakerType.parse("1, 0")


def test_type_rank_must_match():
    with pytest.raises(ValueError):
        whittaker_vectors(mb_module(2, [1, 1]), "1,1,1", 3)


# ---------------------------------------------------------------------------
# Whittaker vectors


@pytest.mark.parametrize("D", [3, 4, 5, 6])
@pytest.mark.parametrize("b", [[1, 1], [2, "i"], ["1/2", -3]])
def test_mb_whittaker_space_is_one_dimensional(b, D):
    M = mb_module(2, b)
    r = whittaker_vectors(M, b, D)
    assert r.dim == 1 and r.basis == [M.one()]


def test_mb_dimension_matches_sympy_oracle():
    M = mb_module(2, [2, "i"])
    assert _sympy_kernel_dim(M, M.natural_type, 4) == 1
    assert _sympy_kernel_dim(M, (1, 1), 4) == 0


def test_nilsson_whittaker_vector():
    N = nilsson_module(2)
    r = whittaker_vectors(N, "i,i", 5)
    assert r.dim == 1 and r.basis == [N.one()]
    assert _sympy_kernel_dim(N, N.natural_type, 4) == 1


def test_wrong_type_has_no_whittaker_vectors():
    assert whittaker_vectors(mb_module(2, [1, 1]), "2,2", 5).dim == 0


def test_mb_n3():
    M = mb_module(3, [1, 2, "i"])
    assert whittaker_vectors(M, M.natural_type, 3).basis == [M.one()]


def test_raising_operator_escapes_truncation():
    M = mb_module(2, [1, 1])
    space = TruncatedSpace(M, 3)
    with pytest.raises(TruncationError, match="truncation not invariant"):
        space.matrix(lambda v: M.act(Xp(0, 0), v))


# ---------------------------------------------------------------------------
# nilpotency


def test_nilpotency_example():
    M = mb_module(2, [2, 3])
    r = local_nilpotency(M, M.natural_type, 3)
    assert r.table[((3, 0), 0)] == 4 and r.table[((3, 0), 1)] == 1
    assert r.certified
    assert r.table[((0, 0), 0)] == 1


@pytest.mark.parametrize("make", [lambda: mb_module(2, ["i", 5]), lambda: nilsson_module(2)])
def test_nilpotency_index_is_degree_plus_one(make):
    M = make()
    r = local_nilpotency(M, M.natural_type, 4)
    for (m, i), k in r.table.items():
        assert k == m[i] + 1


def test_wrong_type_is_not_nilpotent():
    with pytest.raises(NotNilpotentError, match="not nilpotent within bound"):
        local_nilpotency(mb_module(2, [1, 1]), "2,2", 3)


def test_nilpotency_report_keys():
    d = local_nilpotency(mb_module(2, [1, 1]), "1,1", 1).to_dict()
    assert d == {"[0, 0]:1": 1, "[0, 0]:2": 1, "[0, 1]:1": 1, "[0, 1]:2": 2, "[1, 0]:1": 2, "[1, 0]:2": 1}


# ---------------------------------------------------------------------------
# Y^m and the reduction


def test_ym_examples():
    M = mb_module(2, [2, 3])
    v = X("x1^2 + x2")
    assert ym_apply(M, M.natural_type, (0, 0), v) == v
    # (d1^2 - b1^2) x1 = b1^2 (x1 + 2) - b1^2 x1
    assert ym_apply(M, M.natural_type, (1, 0), X("x1")) == X("8")


@pytest.mark.parametrize("m", [(1, 0), (0, 2), (2, 1), (3, 3)])
def test_ym_hm_one_is_nonzero_scalar(m):
    M = mb_module(2, ["i", "1/2"])
    k = ym_apply(M, M.natural_type, m, h_power_apply(M, m, M.one()))
    assert k.is_constant() and k


def test_reduction_example():
    M = mb_module(2, [1, 1])
    r = free_basis_reduction(M, "1,1", X("x1"), 5)
    assert r.coefficients == {(1, 0): 1, (0, 0): Fraction(-1, 2)}
    assert r.reconstruct(M) == X("x1")


def test_reduction_of_whittaker_vector():
    M = mb_module(2, [1, 1])
    r = free_basis_reduction(M, "1,1", X("3"), 5)
    assert r.coefficients == {(0, 0): 3} and r.steps == [(0, 0)]


def test_nilsson_reduction_leading_term():
    N = nilsson_module(2)
    w = parse_poly("h1*h2", 2).with_var("h")
    r = free_basis_reduction(N, "i,i", w, 5)
    assert r.steps[0] == (1, 1) and r.coefficients[(1, 1)] == 1
    assert r.reconstruct(N) == w


def test_reduction_refuses_wrong_type():
    with pytest.raises(ReductionStuck, match="reduction stuck"):
        free_basis_reduction(mb_module(2, [1, 1]), "2,2", X("x1"), 4)


def _random_poly(n, var):
    return st.dictionaries(st.sampled_from(exponents_up_to(n, 5)), scalars, min_size=1, max_size=5).map(
        lambda d: MultiPoly(n, d, var)
    )


@settings(max_examples=50)
@given(_random_poly(2, "x"), st.sampled_from([[1, 1], [2, "i"], ["-1/2", 3]]))
def test_reduction_round_trip_and_monotone(w, b):
    M = mb_module(2, b)
    r = free_basis_reduction(M, b, w, 5)
    assert r.reconstruct(M) == w
    for prev, nxt in zip(r.steps, r.steps[1:]):
        assert compare_exponents(nxt, prev) < 0


@settings(max_examples=25)
@given(_random_poly(2, "h"))
def test_nilsson_round_trip(w):
    N = nilsson_module(2)
    assert free_basis_reduction(N, "i,i", w, 5).reconstruct(N) == w


MONOS = exponents_up_to(2, 4)


@settings(max_examples=40)
@given(st.dictionaries(st.sampled_from(MONOS), scalars, min_size=1, max_size=4), st.sampled_from(MONOS))
def test_ym_kills_lower_expansions(coeffs, m):
    # Y^m sum c h^{m''} 1 = 0 when every m'' is below m in the graded order
    M = mb_module(2, [2, "i"])
    w = MultiPoly.zero(2, "x")
    for mm, c in coeffs.items():
        if compare_exponents(mm, m) < 0:
            w = w + h_power_apply(M, mm, M.one()).scale(c)
    assert not ym_apply(M, M.natural_type, m, w)


def test_order_degree():
    M = mb_module(2, [1, 1])
    assert order_degree(M, "1,1", MultiPoly.zero(2, "x"), 4) is None
    # (2, 1) and (0, 3) have the same total degree; the first is higher
    assert order_degree(M, "1,1", X("x1^2*x2 + x2^3"), 4) == (2, 1)
    assert order_degree(M, "1,1", X("x1*x2 + x2^3"), 4) == (0, 3)
    assert order_degree(M, "1,1", X("x1^2*x2"), 4) == (2, 1)


# ---------------------------------------------------------------------------
# block constraints


@pytest.mark.parametrize(
    "mu, ok",
    [
        (["-1/2", "-1/2"], True),
        (["-1/2"] * 4, True),
        ([0, 0], False),
        (["3/2", "1/2"], True),
        (["1/2", "3/2"], False),
        (["-1/2", "-3/2"], True),
        (["-3/2", "-3/2"], False),
        (["1/2", "i"], False),
    ],
)
def test_block_constraints(mu, ok):
    r = block_constraints([parse_scalar(x) if isinstance(x, str) else x for x in mu])
    assert r.passed is ok
    assert bool(r.reasons) is not ok
