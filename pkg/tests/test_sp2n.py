import itertools

import pytest
import sympy

from spweyl.sp2n import (
    H,
    LabelError,
    SpElement,
    Xe,
    Xm,
    Xp,
    basis,
    bracket,
    coordinates,
    dimension,
    jacobi_violations,
    parse_label,
    realize,
    sample_triples,
    structure_constants,
    verify_eq1_suite,
)


def sym_matrix(b, n):
    """Oracle: the root-vector matrices written directly with sympy."""
    M = sympy.zeros(2 * n, 2 * n)

    def e(r, c):
        out = sympy.zeros(2 * n, 2 * n)
        out[r, c] = 1
        return out

    i, j = b.i, b.j
    if b.kind == "h":
        M = e(i, i) - e(n + i, n + i)
    elif b.kind == "Xp":
        M = e(i, n + j) + e(j, n + i)
    elif b.kind == "Xm":
        M = e(n + i, j) + e(n + j, i)
    else:
        M = e(i, j) - e(n + j, n + i)
    return M


def sym_coordinates(M, n):
    """Solve for basis coordinates of a sympy matrix by least squares free linear algebra."""
    bs = basis(n)
    cols = sympy.Matrix.hstack(*[sym_matrix(b, n).reshape(4 * n * n, 1) for b in bs])
    sol, params = cols.gauss_jordan_solve(M.reshape(4 * n * n, 1))
    assert not params
    return {b: sol[k] for k, b in enumerate(bs) if sol[k] != 0}


def as_sym(el: SpElement):
    return {b: sympy.Rational(c.re.numerator, c.re.denominator) for b, c in el.coeffs.items()}


def test_realize_examples():
    assert realize(H(0), 2).dense() == [[1, 0, 0, 0], [0, 0, 0, 0], [0, 0, -1, 0], [0, 0, 0, 0]]
    assert realize(Xp(0, 0), 2).entries == {(0, 2): 2}


@pytest.mark.parametrize("n", [2, 3, 4])
def test_every_basis_matrix_is_symplectic(n):
    for b in basis(n):
        assert realize(b, n).is_symplectic()


@pytest.mark.parametrize("n", [2, 3, 4])
def test_basis_is_independent_with_right_dimension(n):
    bs = basis(n)
    assert len(bs) == dimension(n) == n * (2 * n + 1)
    cols = sympy.Matrix.hstack(*[sym_matrix(b, n).reshape(4 * n * n, 1) for b in bs])
    assert cols.rank() == len(bs)


def test_bracket_examples():
    assert bracket(Xe(0, 1), Xp(1, 1), 2) == SpElement.of(Xp(0, 1), 2)
    assert bracket(H(0), H(1), 2) == 0
    assert bracket(Xp(0, 0), Xm(0, 0), 2) == SpElement.of(H(0), 4)
    assert bracket(Xp(0, 1), Xm(0, 1), 2) == SpElement({H(0): 1, H(1): 1})
    assert bracket(Xe(0, 1), Xe(2, 0), 3) == SpElement.of(Xe(2, 1), -1)


@pytest.mark.parametrize("n", [2, 3])
def test_structure_constants_match_sympy_oracle(n):
    table = structure_constants(n)
    for x, y in itertools.product(basis(n), repeat=2):
        A, B = sym_matrix(x, n), sym_matrix(y, n)
        assert as_sym(table[(x, y)]) == sym_coordinates(A * B - B * A, n)


@pytest.mark.parametrize("n", [2, 3])
def test_cartan_acts_by_roots(n):
    table = structure_constants(n)
    for b in basis(n):
        if b.kind == "h":
            continue
        root = b.root(n)
        for i in range(n):
            assert table[(H(i), b)] == SpElement.of(b, root[i])


@pytest.mark.parametrize("n", [2, 3])
def test_antisymmetry(n):
    table = structure_constants(n)
    for x, y in itertools.product(basis(n), repeat=2):
        assert table[(x, y)] == -table[(y, x)]


@pytest.mark.parametrize("n", [2, 3, 4])
def test_closed_form_suite(n):
    report = verify_eq1_suite(n)
    assert report.passed
    assert set(report.checked) == {"Xe,Xe", "Xp,Xm", "Xe,Xp", "Xe,Xm"}


def test_closed_form_suite_range():
    with pytest.raises(ValueError):
        verify_eq1_suite(5)


def test_jacobi_full_n2():
    assert jacobi_violations(2) == []


@pytest.mark.parametrize("n", [3, 4])
def test_jacobi_sampled(n):
    assert jacobi_violations(n, sample_triples(n, 300, seed=n)) == []


def test_coordinates_rejects_non_symplectic():
    from spweyl.sp2n import SpMatrix

    with pytest.raises(ValueError):
        coordinates(SpMatrix(2, {(0, 1): 1}))


def test_labels():
    assert parse_label("Xp(2,1)") == Xp(0, 1)
    assert parse_label("h(2)", 2) == H(1)
    assert Xm(1, 0).label == "Xm(1,2)"
    for bad in ["Xe(1,1)", "Xq(1,2)", "h(0)", "Xp(1,3)"]:
        with pytest.raises(LabelError):
            parse_label(bad, 2)
