"""Smith normal form of sparse integer matrices.

The reduction works in place on a dict-of-rows / dict-of-columns copy of the
matrix.  A unit pivot is taken from the shortest column that has one (the
shortest row inside it); without units the pivot has minimal absolute value,
ties broken by Markowitz count and position.  The choice is deterministic.
Integers are Python ints throughout; intermediate entries may grow past
machine words.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from math import gcd
from typing import Dict, List, Optional, Tuple

from .matrix import ExactMatrix
from .rings import INTEGERS


@dataclass(frozen=True)
class SmithForm:
    """``U @ M @ V == D`` with ``U``, ``V`` unimodular over Z.

    ``diagonal`` lists the nonzero invariant factors d_1 | d_2 | ... | d_r.
    The inverses are present when requested.
    """

    U: ExactMatrix
    D: ExactMatrix
    V: ExactMatrix
    U_inv: Optional[ExactMatrix]
    V_inv: Optional[ExactMatrix]
    diagonal: Tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.diagonal)


class _Reducer:
    def __init__(self, M: ExactMatrix, transforms: bool, inverses: bool):
        A = M.integer_rows() if M.ring.kind == "Q" else M
        self.m, self.n = M.nrows, M.ncols
        self.rows: Dict[int, Dict[int, int]] = {i: dict(r) for i, r in A.nonzero_rows()}
        self.cols: Dict[int, Dict[int, int]] = {}
        for i, r in self.rows.items():
            for j, v in r.items():
                self.cols.setdefault(j, {})[i] = v
        self.transforms = transforms
        self.inverses = inverses and transforms
        # lazy (length, column) heap for unit pivots; touched columns are re-pushed
        self._heap: List[Tuple[int, int]] = []
        self._dirty = set(self.cols)
        if transforms:
            self.U = {i: {i: 1} for i in range(self.m)}          # rows
            self.V = {j: {j: 1} for j in range(self.n)}          # columns
        if self.inverses:
            self.U_inv = {i: {i: 1} for i in range(self.m)}      # columns
            self.V_inv = {j: {j: 1} for j in range(self.n)}      # rows

    # elementary updates -----------------------------------------------------

    def _set(self, i, j, v):
        self._dirty.add(j)
        if v:
            self.rows.setdefault(i, {})[j] = v
            self.cols.setdefault(j, {})[i] = v
        else:
            r = self.rows.get(i)
            if r is not None and j in r:
                del r[j]
                if not r:
                    del self.rows[i]
            c = self.cols.get(j)
            if c is not None and i in c:
                del c[i]
                if not c:
                    del self.cols[j]

    @staticmethod
    def _axpy(vecs, dst, src, c):
        s = vecs.get(src)
        if not s:
            return
        d = vecs.setdefault(dst, {})
        for k, v in s.items():
            w = d.get(k, 0) + c * v
            if w:
                d[k] = w
            else:
                d.pop(k, None)

    def row_op(self, dst, src, c):
        """row[dst] += c * row[src]"""
        for j, v in list(self.rows.get(src, {}).items()):
            self._set(dst, j, self.rows.get(dst, {}).get(j, 0) + c * v)
        if self.transforms:
            self._axpy(self.U, dst, src, c)
        if self.inverses:
            self._axpy(self.U_inv, src, dst, -c)

    def col_op(self, dst, src, c):
        """col[dst] += c * col[src]"""
        for i, v in list(self.cols.get(src, {}).items()):
            self._set(i, dst, self.rows.get(i, {}).get(dst, 0) + c * v)
        if self.transforms:
            self._axpy(self.V, dst, src, c)
        if self.inverses:
            self._axpy(self.V_inv, src, dst, -c)

    def negate_row(self, i):
        for j, v in list(self.rows.get(i, {}).items()):
            self._set(i, j, -v)
        if self.transforms:
            self.U[i] = {k: -v for k, v in self.U[i].items()}
        if self.inverses:
            self.U_inv[i] = {k: -v for k, v in self.U_inv[i].items()}

    # pivoting ---------------------------------------------------------------

    def choose_pivot(self):
        cols, rows = self.cols, self.rows
        if not cols:
            return None
        # shortest column holding a unit, then the shortest row within it.
        # A popped column without a unit is dropped until it is touched again.
        heap = self._heap
        for j in self._dirty:
            c = cols.get(j)
            if c:
                heapq.heappush(heap, (len(c), j))
        self._dirty.clear()
        while heap:
            length, j = heapq.heappop(heap)
            c = cols.get(j)
            if c is None or len(c) != length:
                continue
            best = None
            for i, v in c.items():
                if (v == 1 or v == -1) and (best is None or (len(rows[i]), i) < best[0]):
                    best = ((len(rows[i]), i), i)
            if best is not None:
                heapq.heappush(heap, (length, j))
                return best[1], j
        best = None
        best_key = None
        for i, r in rows.items():
            lr = len(r) - 1
            for j, v in r.items():
                key = (abs(v), lr * (len(cols[j]) - 1), i, j)
                if best_key is None or key < best_key:
                    best_key = key
                    best = (i, j)
        return best

    def reduce_pivot(self, i, j):
        """Clear row i and column j around pivot (i, j); returns final position."""
        while True:
            p = self.rows[i][j]
            moved = False
            for i2, a in list(self.cols[j].items()):
                if i2 == i:
                    continue
                q = a // p
                self.row_op(i2, i, -q)
                rem = self.rows.get(i2, {}).get(j, 0)
                if rem:
                    i = i2
                    moved = True
                    break
            if moved:
                continue
            if not self.transforms and abs(p) == 1:
                return i, j
            for j2, a in list(self.rows[i].items()):
                if j2 == j:
                    continue
                q = a // p
                self.col_op(j2, j, -q)
                rem = self.rows.get(i, {}).get(j2, 0)
                if rem:
                    j = j2
                    moved = True
                    break
            if moved:
                continue
            if abs(p) == 1 or not self.transforms:
                return i, j
            bad = self._non_divisible(p, i, j)
            if bad is None:
                return i, j
            self.row_op(i, bad, 1)

    def _non_divisible(self, p, pi, pj):
        for i, r in self.rows.items():
            if i == pi:
                continue
            for j, v in r.items():
                if v % p:
                    return i
        return None

    def run(self):
        pivots: List[Tuple[int, int, int]] = []
        while True:
            pos = self.choose_pivot()
            if pos is None:
                break
            i, j = self.reduce_pivot(*pos)
            if self.rows[i][j] < 0 and self.transforms:
                self.negate_row(i)
            d = self.rows[i][j]
            pivots.append((i, j, abs(d)))
            # Without transforms the rest of row i would be cleared by column
            # operations touching nothing else.  With transforms the row is
            # already clean.  Either way the pivot leaves the active matrix.
            for j2 in list(self.rows[i]):
                self._set(i, j2, 0)
        return pivots


def _invariant_chain(values: List[int]) -> Tuple[int, ...]:
    """Normalize a diagonal into a divisibility chain (gcd/lcm sweeps)."""
    vals = sorted(v for v in values if v)
    k = len(vals)
    for a in range(k):
        for b in range(a + 1, k):
            x, y = vals[a], vals[b]
            g = gcd(x, y)
            if g != x:
                vals[a], vals[b] = g, x // g * y
    return tuple(vals)


def smith_diagonal(M: ExactMatrix) -> Tuple[int, ...]:
    """Nonzero invariant factors of ``M`` (entries lifted to Z) without transforms."""
    red = _Reducer(M, transforms=False, inverses=False)
    pivots = red.run()
    return _invariant_chain([d for _, _, d in pivots])


def smith_decomposition(M: ExactMatrix, inverses: bool = False) -> SmithForm:
    """Full decomposition over Z of the integer lift of ``M``.

    For a rational matrix the rows are first cleared of denominators, which
    preserves rank and kernel over Q but not the transforms' relation to the
    original matrix; rational callers only rely on the kernel.
    """
    red = _Reducer(M, transforms=True, inverses=inverses)
    pivots = red.run()
    m, n = red.m, red.n
    prow = [i for i, _, _ in pivots]
    pcol = [j for _, j, _ in pivots]
    seen_r = set(prow)
    seen_c = set(pcol)
    row_order = prow + [i for i in range(m) if i not in seen_r]
    col_order = pcol + [j for j in range(n) if j not in seen_c]
    col_pos = {j: t for t, j in enumerate(col_order)}

    Z = INTEGERS
    U = ExactMatrix(Z, m, m, {t: red.U[i] for t, i in enumerate(row_order) if red.U[i]})
    V = ExactMatrix(Z, n, n, _cols_to_rows({col_pos[j]: c for j, c in red.V.items()}))
    D = ExactMatrix(Z, m, n, {t: {t: d} for t, (_, _, d) in enumerate(pivots)})
    U_inv = V_inv = None
    if red.inverses:
        row_pos = {i: t for t, i in enumerate(row_order)}
        U_inv = ExactMatrix(Z, m, m, _cols_to_rows({row_pos[i]: c for i, c in red.U_inv.items()}))
        V_inv = ExactMatrix(Z, n, n, {t: red.V_inv[j] for t, j in enumerate(col_order) if red.V_inv[j]})
    return SmithForm(U, D, V, U_inv, V_inv, tuple(d for _, _, d in pivots))


def _cols_to_rows(cols: Dict[int, Dict[int, int]]) -> Dict[int, Dict[int, int]]:
    rows: Dict[int, Dict[int, int]] = {}
    for j, c in cols.items():
        for i, v in c.items():
            rows.setdefault(i, {})[j] = v
    return rows


def smith_normal_form(M: ExactMatrix) -> Tuple[ExactMatrix, ExactMatrix, ExactMatrix]:
    """Return ``(U, D, V)`` with ``U @ M @ V == D`` over Z."""
    if M.ring.kind != "Z":
        raise ValueError("smith_normal_form expects an integer matrix")
    f = smith_decomposition(M)
    return f.U, f.D, f.V
