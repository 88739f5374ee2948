"""Exact dense linear algebra over Q(i) for desk-scale truncations."""

from __future__ import annotations

from typing import Sequence

from .scalars import ONE, ZERO, GaussianRational, as_scalar

Matrix = list[list[GaussianRational]]


def to_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[as_scalar(x) for x in row] for row in rows]


def rref(rows: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    m = to_matrix(rows)
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list[list[GaussianRational]]:
    """Basis of ``{x : A x = 0}``, one vector per free column."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows:
        return [[ONE if j == i else ZERO for j in range(ncols)] for i in range(ncols)]
    m, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for r, pc in enumerate(pivots):
            v[pc] = -m[r][f]
        basis.append(v)
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence) -> list[GaussianRational] | None:
    """One solution of ``A x = b`` (free variables set to 0), or None."""
    ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    m, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [ZERO] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = m[r][ncols]
    return x


def inverse(rows: Sequence[Sequence]) -> Matrix:
    n = len(rows)
    aug = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(rows)]
    m, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in m]


class IncrementalSpan:
    """Maintain an echelon basis of a growing span of sparse vectors.

    Vectors are dicts ``key -> scalar``.  ``add`` returns True when the
    vector is new (not in the current span).
    """

    def __init__(self) -> None:
        self.rows: dict[object, dict] = {}  # pivot key -> row normalised at pivot
        self.order: dict = {}

    def __len__(self) -> int:
        return len(self.rows)

    def reduce(self, vec: dict) -> dict:
        v = {k: c for k, c in vec.items() if c}
        # rows are fully reduced, so one pass over the pivots present suffices
        for k in [k for k in v if k in self.rows]:
            f = v[k]
            for kk, cc in self.rows[k].items():
                nv = v.get(kk, ZERO) - f * cc
                if nv:
                    v[kk] = nv
                else:
                    v.pop(kk, None)
        return v

    def add(self, vec: dict, key_order=None) -> bool:
        v = self.reduce(vec)
        if not v:
            return False
        pivot = max(v, key=key_order) if key_order else next(iter(v))
        inv = v[pivot].inverse()
        v = {k: c * inv for k, c in v.items()}
        # keep existing rows reduced with respect to the new pivot
        for pk, row in self.rows.items():
            if pivot in row:
                f = row[pivot]
                for kk, cc in v.items():
                    nv = row.get(kk, ZERO) - f * cc
                    if nv:
                        row[kk] = nv
                    else:
                        row.pop(kk, None)
        self.rows[pivot] = v
        return True

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)
