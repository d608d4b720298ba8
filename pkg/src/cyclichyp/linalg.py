"""Exact sparse linear algebra over Q.

Vectors are dicts {index: coefficient}.  Coefficients stay Python ints as long
as every pivot is ±1 and only become Fractions when a division forces it.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping


class Insoluble(ArithmeticError):
    """Raised by `solve` for an inconsistent system."""


def _div(a, b):
    if b == 1:
        return a
    if b == -1:
        return -a
    return _clean(Fraction(a) / b)


def _clean(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


class Eliminator:
    """Incremental row echelon form.

    A new row is reduced against stored rows in insertion order.  Row k never
    contains the pivot column of any row stored before it, so one sweep in
    insertion order fully reduces a vector.
    """

    def __init__(self):
        self.rows: list[dict] = []
        self.rhs: list = []
        self.cols: list = []
        self.pivot_of: dict = {}
        self.residual = 0

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: Mapping, rhs=0):
        v = {k: c for k, c in vec.items() if c}
        pivot_of = self.pivot_of
        while True:
            best = None
            for col in v:
                pos = pivot_of.get(col)
                if pos is not None and (best is None or pos < best):
                    best = pos
            if best is None:
                return v, rhs
            factor = v[self.cols[best]]
            for col, c in self.rows[best].items():
                nv = v.get(col, 0) - factor * c
                if nv:
                    v[col] = _clean(nv)
                else:
                    v.pop(col, None)
            if self.rhs[best]:
                rhs = _clean(rhs - factor * self.rhs[best])

    def add(self, vec: Mapping, rhs=0) -> bool:
        """Insert a row.  Returns False when it was dependent; `residual` then holds the reduced rhs."""
        v, r = self.reduce(vec, rhs)
        if not v:
            self.residual = r
            return False
        col = None
        for k, c in v.items():
            if c == 1 or c == -1:
                col = k
                break
        if col is None:
            col = min(v, key=lambda k: (len(repr(v[k])), repr(k)))
        p = v[col]
        self.pivot_of[col] = len(self.rows)
        self.cols.append(col)
        self.rows.append({k: _div(c, p) for k, c in v.items()})
        self.rhs.append(_div(r, p) if r else 0)
        return True


def exact_rank(vectors: Iterable[Mapping]) -> int:
    """Rank of a matrix given by sparse rows (or columns)."""
    e = Eliminator()
    for v in vectors:
        e.add(v)
    return e.rank


def nullity(columns: list[Mapping]) -> int:
    """Dimension of the kernel of the matrix with the given sparse columns."""
    return len(columns) - exact_rank(columns)


def transpose(columns: Iterable[Mapping]) -> dict:
    rows: dict = {}
    for j, col in enumerate(columns):
        for i, c in col.items():
            if c:
                rows.setdefault(i, {})[j] = c
    return rows


def solve(columns: list[Mapping], target: Mapping, row_order=None) -> dict:
    """A particular solution x of A·x = target, A given by sparse columns.

    Free variables are set to 0, so the result is deterministic for a fixed
    column order.  Returns {column position: value}.
    """
    rows = transpose(columns)
    keys = set(rows) | {k for k, c in target.items() if c}
    e = Eliminator()
    for key in sorted(keys, key=row_order or repr):
        if not e.add(rows.get(key, {}), target.get(key, 0)) and e.residual:
            raise Insoluble(f"inconsistent at row {key!r}")
    x: dict = {}
    for pos in range(len(e.rows) - 1, -1, -1):
        col = e.cols[pos]
        val = e.rhs[pos]
        for k, c in e.rows[pos].items():
            if k != col and k in x:
                val -= c * x[k]
        val = _clean(val)
        if val:
            x[col] = val
    return x
