"""Exact sparse linear algebra over Q.

Vectors are dicts ``{index: Fraction}`` with no zero entries.  An
:class:`Echelon` keeps reduced vectors keyed by their smallest index, which
is all that rank, kernel and span-sum computations need.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional


def _axpy(y: dict, c: Fraction, x: dict) -> None:
    """y += c*x in place, pruning zeros."""
    for k, v in x.items():
        nv = y.get(k, 0) + c * v
        if nv:
            y[k] = nv
        else:
            y.pop(k, None)


class Echelon:
    """Incremental row echelon form; optionally records how rows were built."""

    def __init__(self, track: bool = False):
        self.rows: dict = {}   # pivot -> (vector normalised to 1 at pivot, combo)
        self.track = track

    def __len__(self):
        return len(self.rows)

    def reduce(self, vec: dict, combo: Optional[dict] = None):
        vec = dict(vec)
        combo = dict(combo) if combo is not None else None
        while vec:
            p = min(vec)
            row = self.rows.get(p)
            if row is None:
                break
            c = -vec[p]
            _axpy(vec, c, row[0])
            if combo is not None:
                _axpy(combo, c, row[1])
        return vec, combo

    def add(self, vec: dict, combo: Optional[dict] = None):
        """Insert ``vec``; return the residual combination if it was dependent."""
        vec, combo = self.reduce(vec, combo)
        if not vec:
            return combo if combo is not None else {}
        p = min(vec)
        inv = 1 / Fraction(vec[p])
        vec = {k: v * inv for k, v in vec.items()}
        if combo is not None:
            combo = {k: v * inv for k, v in combo.items()}
        self.rows[p] = (vec, combo)
        return None

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)[0]


def rank(vectors: Iterable[dict]) -> int:
    e = Echelon()
    for v in vectors:
        e.add(v)
    return len(e)


def kernel(columns: list) -> list:
    """Basis of ``{c : sum_j c_j columns[j] = 0}`` as sparse dicts over ``j``."""
    e = Echelon(track=True)
    out = []
    for j, col in enumerate(columns):
        dep = e.add(col, {j: Fraction(1)})
        if dep is not None:
            out.append(dep)
    return out


def rank_and_kernel(columns: list) -> tuple:
    ker = kernel(columns)
    return len(columns) - len(ker), ker


def relative_rank(extra: Iterable[dict], base: Iterable[dict]) -> int:
    """``dim(span(extra) + span(base)) - dim span(base)``."""
    e = Echelon()
    for v in base:
        e.add(v)
    r0 = len(e)
    for v in extra:
        e.add(v)
    return len(e) - r0


def inverse(mat: list) -> list:
    """Inverse of a square matrix of Fractions (Gauss-Jordan)."""
    n = len(mat)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]
