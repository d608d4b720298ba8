from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cyclichyp.linalg import Insoluble, exact_rank, nullity, solve, transpose


def dense_rank(rows):
    """Oracle: textbook Gaussian elimination on dense Fraction rows."""
    m = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][c]:
                f = m[i][c] / m[rank][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


matrices = st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), min_size=1, max_size=7))


def sparse(rows):
    return [{j: x for j, x in enumerate(r) if x} for r in rows]


@given(matrices)
def test_rank_matches_dense_oracle(rows):
    assert exact_rank(sparse(rows)) == dense_rank(rows)


@given(matrices)
def test_row_and_column_rank_agree(rows):
    cols = transpose(sparse(rows))
    assert exact_rank(sparse(rows)) == exact_rank(cols.values())


@given(matrices, st.data())
def test_solve_hits_reachable_targets(rows, data):
    cols = sparse(rows)
    x = data.draw(st.lists(st.integers(-2, 2), min_size=len(cols), max_size=len(cols)))
    target = {}
    for j, col in enumerate(cols):
        for i, c in col.items():
            target[i] = target.get(i, 0) + x[j] * c
    sol = solve(cols, target)
    got = {}
    for j, v in sol.items():
        for i, c in cols[j].items():
            got[i] = got.get(i, 0) + v * c
    assert {k: v for k, v in got.items() if v} == {k: v for k, v in target.items() if v}


def test_solve_inconsistent():
    with pytest.raises(Insoluble):
        solve([{0: 1}, {0: 2}], {1: 1})


def test_nullity():
    assert nullity([{0: 1, 1: 1}, {0: 2, 1: 2}, {2: 1}]) == 1


def test_fraction_pivots():
    assert exact_rank([{0: 2, 1: 3}, {0: 4, 1: 6}, {0: Fraction(1, 2)}]) == 2
