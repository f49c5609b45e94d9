"""The Godement cosimplicial resolution of a poset sheaf.

Iterating ``G = prod of skyscrapers of stalks`` gives layers ``G^{n+1} F``
whose sections over an open ``U`` are

    Gamma(U, G^{n+1} F) = prod over chains y_0 >= y_1 >= ... >= y_n, y_0 in U, of F_{y_n}.

In that basis the coface ``d^i`` forgets ``y_i`` (restricting along
``F_{y_{n-1}} -> F_{y_n}`` when ``i = n``) and the codegeneracy ``s^j``
evaluates on the chain with ``y_j`` repeated.
"""

from __future__ import annotations

from typing import Dict, List, Tuple

from ..algebra import (
    CochainMap,
    CosimplicialComplex,
    ExactMatrix,
    FreeCochainComplex,
    block_matrix,
)
from ..spaces import GuardExceeded, OpenSet, Point, guard_limit
from .memo import Memo
from .poset_sheaf import PosetSheaf, SheafMap, godement_layer0

DEFAULT_RANK_CEILING = 250_000

Chain = Tuple[Point, ...]


class _Layout:
    """Block offsets of ``prod_{chains} F_{last}`` per internal degree."""

    def __init__(self, F: PosetSheaf, chains: List[Chain]):
        self.chains = chains
        self.position = {c: a for a, c in enumerate(chains)}
        degs = F.degrees
        self.offsets: Dict[int, List[int]] = {}
        self.sizes: Dict[int, List[int]] = {}
        for q in degs:
            sizes = [F.stalks[c[-1]].rank(q) for c in chains]
            offs = [0]
            for r in sizes:
                offs.append(offs[-1] + r)
            self.sizes[q] = sizes
            self.offsets[q] = offs

    def total(self, q: int) -> int:
        offs = self.offsets.get(q)
        return offs[-1] if offs else 0


class GodementTower:
    """Layers ``0..depth`` of the Godement resolution of ``base``.

    ``layer(n)`` is the poset sheaf ``G^{n+1} F`` built by iterating
    :func:`godement_layer0`; ``cosimplicial(U)`` assembles the sections over
    ``U`` into a truncated cosimplicial complex.
    """

    def __init__(self, base: PosetSheaf, depth: int, max_rank: int | None = None):
        if depth < 0:
            raise ValueError("Godement depth must be >= 0")
        self.base = base
        self.depth = depth
        X = base.space
        key = X.rank_key
        self._down = {x: sorted(X.down(x), key=key.__getitem__) for x in X.elements}
        ceiling = max_rank if max_rank is not None else guard_limit(DEFAULT_RANK_CEILING)
        self._chains: List[List[Chain]] = []
        level = [(y,) for y in X.linear_extension]
        stalk_total = sum(base.stalks[x].total_rank for x in X.elements)
        total = 0
        for n in range(depth + 1):
            self._chains.append(level)
            total += len(level) * max(1, stalk_total)
            if total > ceiling:
                raise GuardExceeded(
                    f"Godement tower of depth {depth} on {X!r} exceeds the rank ceiling "
                    f"{ceiling}; lower the depth or raise HYPERSHEAF_GUARD")
            if n < depth:
                level = [c + (z,) for c in level for z in self._down[c[-1]]]
        self._layers: List[PosetSheaf] = []
        self._units: List[SheafMap] = []
        self._layouts = Memo()
        self._cosimplicial = Memo()

    @property
    def space(self):
        return self.base.space

    @property
    def ring(self):
        return self.base.ring

    # -- stalkwise layers ----------------------------------------------------------

    def layer(self, n: int) -> PosetSheaf:
        """``G^{n+1}(base)`` as a poset sheaf."""
        if not 0 <= n <= self.depth:
            raise IndexError(f"layer {n} outside 0..{self.depth}")
        while len(self._layers) <= n:
            prev = self._layers[-1] if self._layers else self.base
            G, unit = godement_layer0(prev)
            self._layers.append(G)
            self._units.append(unit)
        return self._layers[n]

    def unit(self, n: int = 0) -> SheafMap:
        """Unit ``G^n F -> G^{n+1} F``."""
        self.layer(n)
        return self._units[n]

    # -- sections with the chain basis ---------------------------------------------

    def chains(self, n: int, U: OpenSet | None = None) -> List[Chain]:
        level = self._chains[n]
        if U is None:
            return level
        return [c for c in level if c[0] in U]

    def _layout(self, n: int, U: OpenSet) -> _Layout:
        return self._layouts.get((n, U), lambda: _Layout(self.base, self.chains(n, U)))

    def section_complex(self, n: int, U: OpenSet) -> FreeCochainComplex:
        """``Gamma(U, G^{n+1} F)``."""
        lay = self._layout(n, U)
        F = self.base
        ranks = {q: lay.total(q) for q in F.degrees}
        diffs = {}
        for q in F.degrees:
            if q + 1 not in lay.sizes:
                continue
            blocks = {(a, a): F.stalks[c[-1]].d(q) for a, c in enumerate(lay.chains)}
            diffs[q] = block_matrix(F.ring, lay.sizes[q + 1], lay.sizes[q], blocks)
        return FreeCochainComplex(F.ring, ranks, diffs, check=False)

    def coface(self, n: int, i: int, U: OpenSet, src: FreeCochainComplex, tgt: FreeCochainComplex) -> CochainMap:
        """``d^i : Gamma(U, G^n F) -> Gamma(U, G^{n+1} F)`` for ``1 <= n``, ``0 <= i <= n``."""
        F = self.base
        slay, tlay = self._layout(n - 1, U), self._layout(n, U)
        comps = {}
        for q in F.degrees:
            rows = {}
            soff, toff = slay.offsets[q], tlay.offsets[q]
            for a, c in enumerate(tlay.chains):
                r = tlay.sizes[q][a]
                if not r:
                    continue
                b = slay.position[c[:i] + c[i + 1:]]
                if i == n and c[-2] != c[-1]:
                    blk = F.maps[(c[-2], c[-1])][q]
                    for t, row in blk.nonzero_rows():
                        rows[toff[a] + t] = {soff[b] + u: v for u, v in row.items()}
                else:
                    for t in range(r):
                        rows[toff[a] + t] = {soff[b] + t: 1}
            comps[q] = ExactMatrix(F.ring, tlay.total(q), slay.total(q), rows, _trusted=True)
        return CochainMap(src, tgt, comps, check=False)

    def codegeneracy(self, n: int, j: int, U: OpenSet, src: FreeCochainComplex, tgt: FreeCochainComplex) -> CochainMap:
        """``s^j : Gamma(U, G^{n+2} F) -> Gamma(U, G^{n+1} F)`` for ``0 <= j <= n``."""
        F = self.base
        slay, tlay = self._layout(n + 1, U), self._layout(n, U)
        comps = {}
        for q in F.degrees:
            rows = {}
            soff, toff = slay.offsets[q], tlay.offsets[q]
            for a, c in enumerate(tlay.chains):
                b = slay.position[c[:j + 1] + c[j:]]
                for t in range(tlay.sizes[q][a]):
                    rows[toff[a] + t] = {soff[b] + t: 1}
            comps[q] = ExactMatrix(F.ring, tlay.total(q), slay.total(q), rows, _trusted=True)
        return CochainMap(src, tgt, comps, check=False)

    def cosimplicial(self, U: OpenSet | None = None, check: bool = False) -> CosimplicialComplex:
        """Sections over ``U`` (default: the whole space) as a cosimplicial complex."""
        if U is None:
            U = self.space.whole
        return self._cosimplicial.get((U, check), lambda: self._build(U, check))

    def _build(self, U: OpenSet, check: bool) -> CosimplicialComplex:
        N = self.depth
        objs = [self.section_complex(n, U) for n in range(N + 1)]
        cof = [[]] + [[self.coface(n, i, U, objs[n - 1], objs[n]) for i in range(n + 1)]
                      for n in range(1, N + 1)]
        codeg = [[self.codegeneracy(n, j, U, objs[n + 1], objs[n]) for j in range(n + 1)]
                 for n in range(N)] + [[]]
        return CosimplicialComplex(objs, cof, codeg, check=check)

    def restriction(self, n: int, U: OpenSet, V: OpenSet,
                    src: FreeCochainComplex, tgt: FreeCochainComplex) -> CochainMap:
        """Projection ``Gamma(U, G^{n+1} F) -> Gamma(V, G^{n+1} F)``."""
        F = self.base
        ul, vl = self._layout(n, U), self._layout(n, V)
        comps = {}
        for q in F.degrees:
            rows = {}
            for a, c in enumerate(vl.chains):
                b = ul.position[c]
                for t in range(vl.sizes[q][a]):
                    rows[vl.offsets[q][a] + t] = {ul.offsets[q][b] + t: 1}
            comps[q] = ExactMatrix(F.ring, vl.total(q), ul.total(q), rows, _trusted=True)
        return CochainMap(src, tgt, comps, check=False)

    def augmentation(self, U: OpenSet | None = None) -> CochainMap:
        """``Gamma(U, F) -> Gamma(U, G F)``, the unit on sections."""
        if U is None:
            U = self.space.whole
        F = self.base
        S = F.sections(U)
        lay = self._layout(0, U)
        tgt = self.section_complex(0, U)
        comps = {}
        for q, K in S.basis.items():
            # S embeds into prod_{x in U} F_x in the same point order as chains of length 1
            order = [c[0] for c in lay.chains]
            if tuple(order) != S.points:
                raise AssertionError("section layouts disagree")
            comps[q] = K
        return CochainMap(S.complex, tgt, comps)


def godement_tower(F: PosetSheaf, N: int, max_rank: int | None = None) -> GodementTower:
    return GodementTower(F, N, max_rank)
