import pytest
from hypothesis import given

from spweyl.polyalg import LaurentMultiPoly, MultiPoly, parse_poly
from spweyl.scalars import ZERO
from spweyl.weyl import (
    LeavesPolynomialRing,
    WeylElement,
    falling_factorial,
    format_operator,
    is_even,
    parse_operator,
    weyl_apply,
    weyl_commutator,
    weyl_mul,
)

from conftest import from_sym, laurent_polys, polys, sym_apply, sym_vars, to_sym, weyl_elements

W = lambda text, n=1: parse_operator(text, n)  # noqa: E731


def naive_normal_form(words: dict) -> WeylElement:
    """Oracle: rewrite words with single adjacent swaps d_i t_i -> t_i d_i + 1."""
    todo = dict(words)
    done: dict = {}
    while todo:
        word, c = todo.popitem()
        for k in range(len(word) - 1):
            (a, i), (b, j) = word[k], word[k + 1]
            if a == "d" and b == "t":
                swapped = word[:k] + (word[k + 1], word[k]) + word[k + 2:]
                todo[swapped] = todo.get(swapped, 0) + c
                if i == j:
                    shorter = word[:k] + word[k + 2:]
                    todo[shorter] = todo.get(shorter, 0) + c
                break
        else:
            done[word] = done.get(word, 0) + c
    n = 1 + max((i for w in done for _, i in w), default=0)
    terms: dict = {}
    for word, c in done.items():
        alpha, beta = [0] * n, [0] * n
        for kind, i in word:
            (alpha if kind == "t" else beta)[i] += 1
        key = (tuple(alpha), tuple(beta))
        terms[key] = terms.get(key, ZERO) + c
    return WeylElement(n, terms)


def as_words(w: WeylElement) -> dict:
    out = {}
    for (alpha, beta), c in w.terms.items():
        word = tuple(("t", i) for i, a in enumerate(alpha) for _ in range(a))
        word += tuple(("d", i) for i, b in enumerate(beta) for _ in range(b))
        out[word] = c
    return out


def naive_product(a: WeylElement, b: WeylElement) -> WeylElement:
    words = {}
    for wa, ca in as_words(a).items():
        for wb, cb in as_words(b).items():
            words[wa + wb] = words.get(wa + wb, 0) + ca * cb
    out = naive_normal_form(words)
    # pad to the right rank
    return WeylElement(a.nvars, {(tuple(al) + (0,) * (a.nvars - len(al)), tuple(be) + (0,) * (a.nvars - len(be))): c
                                 for (al, be), c in out.terms.items()})


def test_d_times_t():
    assert W("d1") * W("t1") == W("t1*d1 + 1")


def test_t_times_d_is_normal():
    assert W("t1") * W("d1") == W("t1*d1")


def test_second_order_swap():
    assert W("d1^2") * W("t1^2") == W("t1^2*d1^2 + 4*t1*d1 + 2")


def test_second_order_swap_on_powers():
    # oracle: both sides applied to t^k, k = 0..4
    lhs, rhs = W("d1^2") * W("t1^2"), W("t1^2*d1^2 + 4*t1*d1 + 2")
    for k in range(5):
        v = MultiPoly.monomial((k,))
        assert weyl_apply(lhs, v) == weyl_apply(rhs, v) == MultiPoly.monomial((k,), (k + 2) * (k + 1))


def test_commutator_examples():
    assert weyl_commutator(W("t1^2"), W("-1*d1^2")) == W("4*t1*d1 + 2")
    a = W("t1*d2 + 3", 2)
    assert not weyl_commutator(a, a)
    assert weyl_commutator(W("t1*d2", 2), W("t2*d1", 2)) == W("t1*d1 - t2*d2", 2)


def test_is_even_examples():
    assert is_even(W("t1*t2", 2))
    assert not is_even(W("d1"))
    assert is_even(W("t1^2*d1*d2", 2))
    assert not is_even(W("t1^-1*d1"))


def test_apply_examples():
    assert weyl_apply(W("t1*d1"), MultiPoly.monomial((3,))) == MultiPoly.monomial((3,), 3)
    assert not weyl_apply(W("d1^2", 2), parse_poly("t1*t2", 2))
    v = LaurentMultiPoly(2, {(2, 2): 1})
    assert weyl_apply(W("t1^-1*d1", 2), v) == LaurentMultiPoly(2, {(0, 2): 2})


def test_apply_leaving_polynomial_ring():
    with pytest.raises(LeavesPolynomialRing):
        weyl_apply(W("t1^-1"), MultiPoly.one(1))
    # stays polynomial: allowed on a polynomial carrier
    assert weyl_apply(W("t1^-1*d1"), MultiPoly.monomial((2,))) == MultiPoly.constant(1, 2)


def test_falling_factorial_negative():
    assert falling_factorial(-1, 3) == -6
    assert falling_factorial(4, 5) == 0


def test_laurent_reorder():
    # d t^-1 = t^-1 d - t^-2
    assert W("d1") * W("t1^-1") == W("t1^-1*d1 - t1^-2")


def test_parse_format_round_trip():
    a = W("-1*d1^2 + 2*t1^-1*d1")
    assert format_operator(a) == "-d1^2 + 2*t1^-1*d1"
    assert parse_operator(format_operator(a), 1) == a
    with pytest.raises(ValueError):
        parse_operator("d1*t1", 1)


@given(weyl_elements(2, 2), weyl_elements(2, 2))
def test_product_matches_naive_swaps(a, b):
    assert weyl_mul(a, b) == naive_product(a, b)


@given(weyl_elements(3, 3), weyl_elements(3, 3), weyl_elements(3, 3))
def test_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(weyl_elements(2, 2, laurent=True), weyl_elements(2, 2, laurent=True), weyl_elements(2, 2, laurent=True))
def test_associative_laurent(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(weyl_elements(3, 2), weyl_elements(3, 2), weyl_elements(3, 2))
def test_jacobi(a, b, c):
    total = weyl_commutator(a, weyl_commutator(b, c)) + weyl_commutator(b, weyl_commutator(c, a))
    total = total + weyl_commutator(c, weyl_commutator(a, b))
    assert not total


@given(weyl_elements(2, 3), weyl_elements(2, 3), polys(2, 4))
def test_representation_fidelity(a, b, p):
    assert weyl_apply(a * b, p) == weyl_apply(a, weyl_apply(b, p))


@given(weyl_elements(2, 3, laurent=True), laurent_polys(2, 3))
def test_apply_matches_sympy_differentiation(a, p):
    t = sym_vars(2)
    expr = sym_apply(a, to_sym(p), t)
    assert from_sym(expr, 2, laurent=True) == weyl_apply(a, p)


@given(weyl_elements(2, 3), weyl_elements(2, 3))
def test_even_closure(a, b):
    if is_even(a) and is_even(b):
        assert is_even(a * b)
