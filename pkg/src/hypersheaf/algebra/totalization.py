"""Double complexes, cosimplicial complexes and their totalizations.

Sign convention: a :class:`DoubleComplex` has *commuting* squares and the
sign enters at totalization, ``d = d_h + (-1)^p d_v`` on ``C^{p,q}``.
"""

from __future__ import annotations

from typing import Dict, List, Mapping, Sequence, Tuple

from .complexes import CochainMap, ComplexError, FreeCochainComplex
from .lattice import kernel_basis, restrict
from .matrix import ExactMatrix, block_matrix, vstack
from .rings import CoefficientRing


class DoubleComplex:
    """Bigraded free modules ``C^{p,q}`` on a finite region.

    ``horizontal[(p, q)] : C^{p,q} -> C^{p+1,q}`` and
    ``vertical[(p, q)] : C^{p,q} -> C^{p,q+1}``; missing entries are zero.
    """

    def __init__(self, ring: CoefficientRing, ranks: Mapping[Tuple[int, int], int],
                 horizontal: Mapping[Tuple[int, int], ExactMatrix] | None = None,
                 vertical: Mapping[Tuple[int, int], ExactMatrix] | None = None,
                 *, check: bool = True):
        self.ring = ring
        self._ranks = {pq: int(r) for pq, r in ranks.items() if r}
        self._h = {}
        self._v = {}
        for pq, m in (horizontal or {}).items():
            p, q = pq
            self._check_shape(m, (p + 1, q), pq, "horizontal")
            if not m.is_zero():
                self._h[pq] = m
        for pq, m in (vertical or {}).items():
            p, q = pq
            self._check_shape(m, (p, q + 1), pq, "vertical")
            if not m.is_zero():
                self._v[pq] = m
        if check:
            self.validate()

    def _check_shape(self, m, tgt, src, what):
        if m.shape != (self.rank(*tgt), self.rank(*src)):
            raise ComplexError(f"{what} map at {src} has shape {m.shape}, "
                               f"expected {(self.rank(*tgt), self.rank(*src))}")

    def rank(self, p: int, q: int) -> int:
        return self._ranks.get((p, q), 0)

    def h(self, p, q) -> ExactMatrix:
        m = self._h.get((p, q))
        return m if m is not None else ExactMatrix.zeros(self.ring, self.rank(p + 1, q), self.rank(p, q))

    def v(self, p, q) -> ExactMatrix:
        m = self._v.get((p, q))
        return m if m is not None else ExactMatrix.zeros(self.ring, self.rank(p, q + 1), self.rank(p, q))

    @property
    def positions(self) -> List[Tuple[int, int]]:
        return sorted(self._ranks)

    def validate(self):
        for (p, q) in self.positions:
            if not (self.h(p + 1, q) @ self.h(p, q)).is_zero():
                raise ComplexError(f"horizontal d^2 != 0 at {(p, q)}")
            if not (self.v(p, q + 1) @ self.v(p, q)).is_zero():
                raise ComplexError(f"vertical d^2 != 0 at {(p, q)}")
            if self.v(p + 1, q) @ self.h(p, q) != self.h(p, q + 1) @ self.v(p, q):
                raise ComplexError(f"square at {(p, q)} does not commute")

    def total_layout(self) -> Dict[int, List[Tuple[int, int]]]:
        """Total degree -> the positions summed there, ordered by p."""
        out: Dict[int, List[Tuple[int, int]]] = {}
        for p, q in self.positions:
            out.setdefault(p + q, []).append((p, q))
        for k in out:
            out[k].sort()
        return out


def totalize_double(D: DoubleComplex) -> FreeCochainComplex:
    """Direct-sum totalization with ``d = d_h + (-1)^p d_v``."""
    layout = D.total_layout()
    ring = D.ring
    ranks = {k: sum(D.rank(*pq) for pq in pos) for k, pos in layout.items()}
    diffs = {}
    for k, src in layout.items():
        tgt = layout.get(k + 1, [])
        tindex = {pq: a for a, pq in enumerate(tgt)}
        blocks = {}
        for b, (p, q) in enumerate(src):
            if (p + 1, q) in tindex:
                blocks[(tindex[(p + 1, q)], b)] = D.h(p, q)
            if (p, q + 1) in tindex:
                m = D.v(p, q)
                blocks[(tindex[(p, q + 1)], b)] = m if p % 2 == 0 else -m
        diffs[k] = block_matrix(ring, [D.rank(*pq) for pq in tgt], [D.rank(*pq) for pq in src], blocks)
    return FreeCochainComplex(ring, ranks, diffs)


class CosimplicialComplex:
    """A truncated cosimplicial object ``C^0, ..., C^N`` in free cochain complexes.

    ``cofaces[n][i]`` is ``d^i : C^{n-1} -> C^n`` (``1 <= n <= N``,
    ``0 <= i <= n``); ``codegeneracies[n][j]`` is ``s^j : C^{n+1} -> C^n``
    (``0 <= n < N``, ``0 <= j <= n``).  ``cofaces[0]`` and
    ``codegeneracies[N]`` are empty lists.
    """

    def __init__(self, objects: Sequence[FreeCochainComplex],
                 cofaces: Sequence[Sequence[CochainMap]],
                 codegeneracies: Sequence[Sequence[CochainMap]], *, check: bool = True):
        if not objects:
            raise ComplexError("cosimplicial complex needs at least degree 0")
        self.objects = list(objects)
        self.cofaces = [list(c) for c in cofaces]
        self.codegeneracies = [list(s) for s in codegeneracies]
        self.ring = objects[0].ring
        N = self.depth
        if len(self.cofaces) != N + 1 or len(self.codegeneracies) != N + 1:
            raise ComplexError("coface/codegeneracy lists must have one entry per degree")
        for n in range(N + 1):
            if len(self.cofaces[n]) != (n + 1 if n else 0):
                raise ComplexError(f"degree {n} needs {n + 1 if n else 0} cofaces")
            if len(self.codegeneracies[n]) != (n + 1 if n < N else 0):
                raise ComplexError(f"degree {n} needs {n + 1 if n < N else 0} codegeneracies")
        if check:
            self.validate()

    @property
    def depth(self) -> int:
        return len(self.objects) - 1

    def validate(self):
        """Check the cosimplicial identities as exact matrix identities."""
        N = self.depth
        d, s = self.cofaces, self.codegeneracies

        def eq(a: CochainMap, b: CochainMap, what: str):
            degs = set(a.source.degrees()) | set(b.source.degrees())
            for k in degs:
                if a[k] != b[k]:
                    raise ComplexError(f"cosimplicial identity violated: {what} (internal degree {k})")

        for n in range(2, N + 1):
            # d^j d^i = d^i d^{j-1} for i < j, maps C^{n-2} -> C^n
            for j in range(n + 1):
                for i in range(j):
                    eq(d[n][j].compose(d[n - 1][i]), d[n][i].compose(d[n - 1][j - 1]),
                       f"d^{j} d^{i} = d^{i} d^{j - 1} in degree {n}")
        for n in range(N - 1):
            # s^j s^i = s^i s^{j+1} for i <= j, maps C^{n+2} -> C^n
            for j in range(n + 1):
                for i in range(j + 1):
                    eq(s[n][j].compose(s[n + 1][i]), s[n][i].compose(s[n + 1][j + 1]),
                       f"s^{j} s^{i} = s^{i} s^{j + 1} in degree {n}")
        for n in range(N):
            # s^j d^i : C^n -> C^{n+1} -> C^n
            for j in range(n + 1):
                for i in range(n + 2):
                    lhs = s[n][j].compose(d[n + 1][i])
                    if i < j:
                        rhs = d[n][i].compose(s[n - 1][j - 1])
                    elif i in (j, j + 1):
                        rhs = self.objects[n].identity()
                    else:
                        rhs = d[n][i - 1].compose(s[n - 1][j])
                    eq(lhs, rhs, f"s^{j} d^{i} in degree {n}")

    def coface_sum(self, n: int) -> CochainMap:
        """``sum_i (-1)^i d^i : C^{n-1} -> C^n``."""
        src, tgt = self.objects[n - 1], self.objects[n]
        comps = {}
        for k in set(src.degrees()) | set(tgt.degrees()):
            acc = ExactMatrix.zeros(self.ring, tgt.rank(k), src.rank(k))
            for i, f in enumerate(self.cofaces[n]):
                acc = acc + f[k] if i % 2 == 0 else acc - f[k]
            comps[k] = acc
        return CochainMap(src, tgt, comps, check=False)


class Totalization:
    """Total complex of a truncated cosimplicial object, with the per-position
    bases of its normalized part (identity bases when unnormalized)."""

    def __init__(self, C: CosimplicialComplex, normalized: bool = True):
        ring = C.ring
        N = C.depth
        self.source = C
        self.normalized = normalized
        sums = [C.coface_sum(n) for n in range(1, N + 1)]
        bases: Dict[Tuple[int, int], Tuple[ExactMatrix, ExactMatrix]] = {}
        for n, obj in enumerate(C.objects):
            for q in obj.degrees():
                size = obj.rank(q)
                if n == 0 or not normalized:
                    I = ExactMatrix.identity(ring, size)
                    bases[(n, q)] = (I, I)
                else:
                    stacked = vstack([s[q] for s in C.codegeneracies[n - 1]])
                    bases[(n, q)] = kernel_basis(stacked)
        self._bases = bases
        ranks = {}
        hor = {}
        ver = {}
        for n, obj in enumerate(C.objects):
            for q in obj.degrees():
                if not normalized:
                    ranks[(n, q)] = obj.rank(q)
                    ver[(n, q)] = obj.d(q)
                    if n < N:
                        hor[(n, q)] = sums[n][q]
                    continue
                K, _ = self.basis(n, q)
                ranks[(n, q)] = K.ncols
                ver[(n, q)] = restrict(obj.d(q), K, self.basis(n, q + 1)[1])
                if n < N:
                    hor[(n, q)] = restrict(sums[n][q], K, self.basis(n + 1, q)[1])
        self.double = DoubleComplex(ring, ranks, hor, ver, check=False)
        self.layout = self.double.total_layout()
        self.complex = totalize_double(self.double)

    def basis(self, n: int, q: int) -> Tuple[ExactMatrix, ExactMatrix]:
        got = self._bases.get((n, q))
        if got is None:
            r = self.source.objects[n].rank(q) if n <= self.source.depth else 0
            ring = self.source.ring
            return ExactMatrix.zeros(ring, r, 0), ExactMatrix.zeros(ring, 0, r)
        return got


def totalize_cosimplicial(C: CosimplicialComplex, normalized: bool = True) -> FreeCochainComplex:
    """Total complex of the truncated cosimplicial object.

    Unnormalized: the alternating coface sum as horizontal differential.
    Normalized: first restrict each ``C^n`` (n >= 1) to the intersection of the
    kernels of all codegeneracies ``C^n -> C^{n-1}``.  The top truncation
    degree is not exact; callers trust cohomology only below it.
    """
    return Totalization(C, normalized).complex


def totalize_cosimplicial_map(levels: Sequence[CochainMap], source: Totalization,
                              target: Totalization) -> CochainMap:
    """Total map induced by levelwise maps commuting with the cosimplicial structure."""
    ring = source.source.ring
    comps = {}
    for k, src_pos in source.layout.items():
        tgt_pos = target.layout.get(k, [])
        tindex = {pq: a for a, pq in enumerate(tgt_pos)}
        blocks = {}
        for b, (p, q) in enumerate(src_pos):
            if (p, q) not in tindex:
                continue
            K, _ = source.basis(p, q)
            _, L = target.basis(p, q)
            blocks[(tindex[(p, q)], b)] = L @ (levels[p][q] @ K)
        comps[k] = block_matrix(ring, [target.double.rank(*pq) for pq in tgt_pos],
                                [source.double.rank(*pq) for pq in src_pos], blocks)
    return CochainMap(source.complex, target.complex, comps)
