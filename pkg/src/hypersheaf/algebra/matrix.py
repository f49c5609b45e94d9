"""Sparse exact matrices over a :class:`CoefficientRing`."""

from __future__ import annotations

from typing import Dict, Iterable, Iterator, List, Sequence, Tuple

from .rings import CoefficientRing, Scalar

Row = Dict[int, Scalar]


class ExactMatrix:
    """An immutable sparse matrix stored as a dict of nonzero rows.

    Entries are kept reduced in ``ring``; zeros are never stored.  Callers
    must not mutate the row dicts returned by :meth:`row`.
    """

    __slots__ = ("ring", "nrows", "ncols", "_rows")

    def __init__(self, ring: CoefficientRing, nrows: int, ncols: int,
                 rows: Dict[int, Row] | None = None, *, _trusted: bool = False):
        if nrows < 0 or ncols < 0:
            raise ValueError("negative matrix shape")
        self.ring = ring
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            rows = {}
        if not _trusted:
            clean: Dict[int, Row] = {}
            for i, row in rows.items():
                if not 0 <= i < nrows:
                    raise IndexError(f"row {i} outside {nrows}")
                r = {}
                for j, v in row.items():
                    if not 0 <= j < ncols:
                        raise IndexError(f"column {j} outside {ncols}")
                    v = ring.reduce(v)
                    if v:
                        r[j] = v
                if r:
                    clean[i] = r
            rows = clean
        self._rows = rows

    # -- construction -------------------------------------------------------

    @classmethod
    def zeros(cls, ring, nrows, ncols) -> "ExactMatrix":
        return cls(ring, nrows, ncols, {}, _trusted=True)

    @classmethod
    def identity(cls, ring, n) -> "ExactMatrix":
        return cls(ring, n, n, {i: {i: 1} for i in range(n)}, _trusted=True)

    @classmethod
    def from_dense(cls, ring, data: Sequence[Sequence], ncols: int | None = None) -> "ExactMatrix":
        nrows = len(data)
        if ncols is None:
            ncols = len(data[0]) if nrows else 0
        rows = {}
        for i, line in enumerate(data):
            if len(line) != ncols:
                raise ValueError("ragged dense matrix")
            rows[i] = {j: v for j, v in enumerate(line) if v}
        return cls(ring, nrows, ncols, rows)

    @classmethod
    def from_triplets(cls, ring, nrows, ncols,
                      triplets: Iterable[Tuple[int, int, Scalar]]) -> "ExactMatrix":
        """Build from ``(row, col, value)`` triplets; repeated positions add up."""
        rows: Dict[int, Row] = {}
        for i, j, v in triplets:
            r = rows.setdefault(i, {})
            r[j] = r.get(j, 0) + v
        return cls(ring, nrows, ncols, rows)

    # -- access ---------------------------------------------------------------

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij) -> Scalar:
        i, j = ij
        return self._rows.get(i, {}).get(j, 0)

    def row(self, i: int) -> Row:
        return self._rows.get(i, {})

    def nonzero_rows(self) -> Iterator[Tuple[int, Row]]:
        return iter(self._rows.items())

    def triplets(self) -> List[Tuple[int, int, Scalar]]:
        return [(i, j, v) for i in sorted(self._rows)
                for j, v in sorted(self._rows[i].items())]

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self._rows.values())

    def is_zero(self) -> bool:
        return not self._rows

    def to_dense(self) -> List[List[Scalar]]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for i, row in self._rows.items():
            for j, v in row.items():
                out[i][j] = v
        return out

    def columns(self) -> Dict[int, Row]:
        cols: Dict[int, Row] = {}
        for i, row in self._rows.items():
            for j, v in row.items():
                cols.setdefault(j, {})[i] = v
        return cols

    # -- arithmetic -------------------------------------------------------------

    def _check_ring(self, other: "ExactMatrix"):
        if self.ring != other.ring:
            raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.ring == other.ring and self.shape == other.shape
                and self._rows == other._rows)

    def __hash__(self):
        return hash((self.ring, self.shape, tuple(self.triplets())))

    def __repr__(self) -> str:
        return f"ExactMatrix({self.ring}, {self.nrows}x{self.ncols}, nnz={self.nnz})"

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self._combine(other, 1)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self._combine(other, -1)

    def _combine(self, other, sign) -> "ExactMatrix":
        self._check_ring(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        rows = {i: dict(r) for i, r in self._rows.items()}
        for i, r in other._rows.items():
            tgt = rows.setdefault(i, {})
            for j, v in r.items():
                tgt[j] = tgt.get(j, 0) + sign * v
        return ExactMatrix(self.ring, self.nrows, self.ncols, rows)

    def __neg__(self) -> "ExactMatrix":
        return self.scale(-1)

    def scale(self, c) -> "ExactMatrix":
        return ExactMatrix(self.ring, self.nrows, self.ncols,
                           {i: {j: c * v for j, v in r.items()} for i, r in self._rows.items()})

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_ring(other)
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        orow = other._rows
        out: Dict[int, Row] = {}
        for i, r in self._rows.items():
            acc: Row = {}
            for k, a in r.items():
                rk = orow.get(k)
                if rk is None:
                    continue
                for j, b in rk.items():
                    acc[j] = acc.get(j, 0) + a * b
            if acc:
                out[i] = acc
        return ExactMatrix(self.ring, self.nrows, other.ncols, out)

    def apply(self, vec: Sequence[Scalar]) -> List[Scalar]:
        """Matrix times a dense column vector."""
        if len(vec) != self.ncols:
            raise ValueError("vector length mismatch")
        out = [0] * self.nrows
        for i, r in self._rows.items():
            out[i] = self.ring.reduce(sum(v * vec[j] for j, v in r.items()))
        return out

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.ring, self.ncols, self.nrows, self.columns(), _trusted=True)

    @property
    def T(self) -> "ExactMatrix":
        return self.transpose()

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "ExactMatrix":
        rpos = {r: a for a, r in enumerate(rows)}
        cpos = {c: b for b, c in enumerate(cols)}
        out: Dict[int, Row] = {}
        for r, a in rpos.items():
            src = self._rows.get(r)
            if not src:
                continue
            new = {cpos[c]: v for c, v in src.items() if c in cpos}
            if new:
                out[a] = new
        return ExactMatrix(self.ring, len(rows), len(cols), out, _trusted=True)

    def change_ring(self, ring: CoefficientRing) -> "ExactMatrix":
        return ExactMatrix(ring, self.nrows, self.ncols, self._rows)

    def integer_rows(self) -> "ExactMatrix":
        """An integer matrix with the same row space over Q.

        Each row is scaled by the lcm of its denominators.  Over Z and Z/m
        this is just the integer lift of the entries.
        """
        from math import lcm
        from fractions import Fraction
        from .rings import INTEGERS

        rows = {}
        for i, r in self._rows.items():
            den = 1
            for v in r.values():
                if isinstance(v, Fraction):
                    den = lcm(den, v.denominator)
            rows[i] = {j: int(v * den) for j, v in r.items()}
        return ExactMatrix(INTEGERS, self.nrows, self.ncols, rows, _trusted=True)

    # -- JSON -------------------------------------------------------------------------

    def to_json(self) -> dict:
        return {"rows": self.nrows, "cols": self.ncols,
                "entries": [[i, j, _scalar_json(v)] for i, j, v in self.triplets()]}

    @classmethod
    def from_json(cls, ring, data: dict) -> "ExactMatrix":
        return cls.from_triplets(ring, int(data["rows"]), int(data["cols"]),
                                 ((int(i), int(j), _scalar_parse(v)) for i, j, v in data["entries"]))


def _scalar_json(v):
    from fractions import Fraction
    if isinstance(v, Fraction):
        return str(v)
    return v


def _scalar_parse(v):
    from fractions import Fraction
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ValueError(f"matrix entries must be integers or fraction strings, got {v!r}")
    return v


def hstack(blocks: Sequence[ExactMatrix], ring=None, nrows=None) -> ExactMatrix:
    if not blocks:
        return ExactMatrix.zeros(ring, nrows or 0, 0)
    ring = blocks[0].ring
    n = blocks[0].nrows
    rows: Dict[int, Row] = {}
    off = 0
    for b in blocks:
        if b.nrows != n:
            raise ValueError("hstack row mismatch")
        for i, r in b.nonzero_rows():
            tgt = rows.setdefault(i, {})
            for j, v in r.items():
                tgt[j + off] = v
        off += b.ncols
    return ExactMatrix(ring, n, off, rows, _trusted=True)


def vstack(blocks: Sequence[ExactMatrix], ring=None, ncols=None) -> ExactMatrix:
    if not blocks:
        return ExactMatrix.zeros(ring, 0, ncols or 0)
    ring = blocks[0].ring
    m = blocks[0].ncols
    rows: Dict[int, Row] = {}
    off = 0
    for b in blocks:
        if b.ncols != m:
            raise ValueError("vstack column mismatch")
        for i, r in b.nonzero_rows():
            rows[i + off] = dict(r)
        off += b.nrows
    return ExactMatrix(ring, off, m, rows, _trusted=True)


def block_matrix(ring, row_sizes: Sequence[int], col_sizes: Sequence[int],
                 blocks: Dict[Tuple[int, int], ExactMatrix]) -> ExactMatrix:
    """Assemble a block matrix; missing blocks are zero."""
    roff = [0]
    for s in row_sizes:
        roff.append(roff[-1] + s)
    coff = [0]
    for s in col_sizes:
        coff.append(coff[-1] + s)
    rows: Dict[int, Row] = {}
    overlap = False
    for (a, b), blk in blocks.items():
        if blk.shape != (row_sizes[a], col_sizes[b]):
            raise ValueError(f"block ({a},{b}) has shape {blk.shape}, "
                             f"expected {(row_sizes[a], col_sizes[b])}")
        if blk.ring != ring:
            blk = blk.change_ring(ring)
        for i, r in blk.nonzero_rows():
            tgt = rows.setdefault(i + roff[a], {})
            for j, v in r.items():
                jj = j + coff[b]
                if jj in tgt:
                    overlap = True
                    tgt[jj] += v
                else:
                    tgt[jj] = v
    if overlap:
        return ExactMatrix(ring, roff[-1], coff[-1], rows)
    return ExactMatrix(ring, roff[-1], coff[-1], rows, _trusted=True)
