"""Exact sparse Gaussian elimination over the rationals.

Vectors are plain ``dict`` objects mapping an integer column to a nonzero
:class:`fractions.Fraction`.  Pivot of a row is its smallest column, so the
result depends only on the set of inserted rows and their order, never on
hashing or scheduling.
"""
from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

Vector = Dict[int, Fraction]


def axpy(y: Vector, a: Fraction, x: Vector) -> None:
    """In place ``y += a*x``, dropping cancelled entries."""
    for k, v in x.items():
        w = y.get(k, 0) + a * v
        if w:
            y[k] = w
        else:
            y.pop(k, None)


class Echelon:
    """Row echelon form grown one row at a time.

    Each stored row has leading coefficient 1 at its pivot and is reduced
    against every pivot that existed when it was inserted.  :meth:`finalize`
    completes the back substitution, after which :meth:`normal_form` maps a
    vector to its unique representative supported on non-pivot columns.
    """

    def __init__(self):
        self.rows: Dict[int, Vector] = {}
        self._final = False

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, v: Vector) -> Vector:
        """Return ``v`` minus its component in the row span restricted to pivots."""
        v = dict(v)
        rows = self.rows
        heap = [c for c in v if c in rows]
        heapq.heapify(heap)
        while heap:
            c = heapq.heappop(heap)
            a = v.get(c)
            if not a:
                continue
            for k, r in rows[c].items():
                w = v.get(k, 0) - a * r
                if w:
                    if k not in v and k in rows:
                        heapq.heappush(heap, k)
                    v[k] = w
                else:
                    v.pop(k, None)
        return v

    def add(self, v: Vector) -> bool:
        """Insert a row; return True iff the rank grew."""
        r = self.reduce(v)
        if not r:
            return False
        p = min(r)
        inv = 1 / Fraction(r[p])
        self.rows[p] = {k: a * inv for k, a in r.items()}
        self._final = False
        return True

    def extend(self, vectors: Iterable[Vector]) -> int:
        return sum(1 for v in vectors if self.add(v))

    def finalize(self) -> None:
        """Back substitute so that no row has an entry in another pivot column."""
        if self._final:
            return
        rows = self.rows
        for p in sorted(rows, reverse=True):
            row = rows[p]
            others = [k for k in row if k != p and k in rows]
            if others:
                for k in sorted(others):
                    a = row.get(k)
                    if a:
                        axpy(row, -a, rows[k])
        self._final = True

    def normal_form(self, v: Vector) -> Vector:
        if not self._final:
            return self.reduce(v)
        out: Vector = {}
        rows = self.rows
        for c, a in v.items():
            if c in rows:
                for k, r in rows[c].items():
                    if k != c:
                        w = out.get(k, 0) - a * r
                        if w:
                            out[k] = w
                        else:
                            out.pop(k, None)
            else:
                w = out.get(c, 0) + a
                if w:
                    out[c] = w
                else:
                    out.pop(c, None)
        return out

    def column_normal_form(self, c: int) -> Vector:
        """Normal form of the unit vector at column ``c`` (requires :meth:`finalize`)."""
        row = self.rows.get(c)
        if row is None:
            return {c: Fraction(1)}
        return {k: -r for k, r in row.items() if k != c}


def rank(rows: Iterable[Vector]) -> int:
    ech = Echelon()
    for r in sorted(rows, key=len):
        ech.add(r)
    return ech.rank


class TrackedEchelon:
    """Echelon form over a list of vectors that remembers how each row was built.

    Used to certify that a family is independent, to extract an explicit
    dependence, and to express vectors in the family's coordinates.
    """

    def __init__(self):
        self.rows: Dict[int, Tuple[Vector, Vector]] = {}

    def _reduce(self, v: Vector, combo: Vector) -> Tuple[Vector, Vector]:
        v = dict(v)
        combo = dict(combo)
        heap = [c for c in v if c in self.rows]
        heapq.heapify(heap)
        while heap:
            c = heapq.heappop(heap)
            a = v.get(c)
            if not a:
                continue
            row, rc = self.rows[c]
            for k, r in row.items():
                w = v.get(k, 0) - a * r
                if w:
                    if k not in v and k in self.rows:
                        heapq.heappush(heap, k)
                    v[k] = w
                else:
                    v.pop(k, None)
            axpy(combo, -a, rc)
        return v, combo

    def add(self, idx: int, v: Vector) -> Optional[Vector]:
        """Insert vector number ``idx``.

        Returns None if it is independent of the earlier ones, otherwise a
        combination ``{i: c_i}`` with ``sum c_i v_i == 0`` and ``c_idx == 1``.
        """
        r, combo = self._reduce(v, {idx: Fraction(1)})
        if not r:
            return combo
        p = min(r)
        inv = 1 / Fraction(r[p])
        self.rows[p] = ({k: a * inv for k, a in r.items()}, {k: a * inv for k, a in combo.items()})
        return None

    def coordinates(self, v: Vector) -> Optional[Vector]:
        """Coefficients ``{i: c_i}`` with ``v == sum c_i v_i``, or None if outside the span."""
        r, combo = self._reduce(v, {})
        if r:
            return None
        return {k: -a for k, a in combo.items()}


def first_dependence(vectors: Sequence[Vector]) -> Optional[Vector]:
    """First linear dependence among ``vectors`` (as index -> coefficient), or None."""
    te = TrackedEchelon()
    for i, v in enumerate(vectors):
        dep = te.add(i, v)
        if dep is not None:
            return dep
    return None


def to_matrix_market(rows: List[Vector], ncols: int) -> str:
    """Coordinate Matrix-Market text with rational entries written as ``p/q``."""
    nnz = sum(len(r) for r in rows)
    out = ["%%MatrixMarket matrix coordinate rational general", f"{len(rows)} {ncols} {nnz}"]
    for i, r in enumerate(rows, 1):
        for c in sorted(r):
            a = Fraction(r[c])
            val = str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"
            out.append(f"{i} {c + 1} {val}")
    return "\n".join(out) + "\n"
