"""Sheaves on a finite space in stalkwise (poset functor) form.

A sheaf ``F`` on an Alexandrov space is determined by ``F_x = F(U_x)`` and
the restrictions ``F_x -> F_y`` for ``y <= x``.  Sections over an arbitrary
open are the limit of that diagram.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Tuple

from ..algebra import (
    CochainMap,
    CoefficientRing,
    ComplexError,
    ExactMatrix,
    FreeCochainComplex,
    block_matrix,
    direct_sum,
    is_surjective,
    kernel_basis,
    vstack,
)
from ..spaces import FinitePoset, OpenSet, Point, all_opens
from .memo import Memo


class PosetSheaf:
    """Stalk complexes ``F_x`` and comparison maps ``F_x -> F_y`` for ``y < x``.

    ``maps`` must contain at least every covering pair ``(x, y)``; the other
    pairs are filled in by composing along chains.  With ``check`` the given
    maps are verified to be functorial.
    """

    def __init__(self, space: FinitePoset, ring: CoefficientRing,
                 stalks: Mapping[Point, FreeCochainComplex],
                 maps: Mapping[Tuple[Point, Point], CochainMap], *, check: bool = True,
                 name: str = "sheaf"):
        self.space = space
        self.ring = ring
        self.name = name
        missing = [x for x in space.elements if x not in stalks]
        if missing:
            raise ValueError(f"no stalk given at {missing}")
        for x, C in stalks.items():
            if C.ring != ring:
                raise ComplexError(f"stalk at {x!r} is over {C.ring}, sheaf over {ring}")
        self.stalks = dict(stalks)
        given = dict(maps)
        for (x, y), f in given.items():
            if not space.lt(y, x):
                raise ValueError(f"comparison map keyed ({x!r}, {y!r}) needs {y!r} < {x!r}")
            if f.source is not self.stalks[x] and f.source != self.stalks[x]:
                raise ComplexError(f"map ({x!r}, {y!r}) does not start at the stalk of {x!r}")
            if f.target is not self.stalks[y] and f.target != self.stalks[y]:
                raise ComplexError(f"map ({x!r}, {y!r}) does not end at the stalk of {y!r}")
        full: Dict[Tuple[Point, Point], CochainMap] = {}
        # fill pairs from the top of the down-set down to the bottom
        order = space.linear_extension
        key = space.rank_key
        covers = space.covering_pairs()
        lower_covers: Dict[Point, List[Point]] = {}
        for a, b in covers:
            lower_covers.setdefault(b, []).append(a)
            if (b, a) not in given:
                raise ValueError(f"missing comparison map for covering pair {a!r} < {b!r}")
        for x in order:
            for y in sorted(space.down(x) - {x}, key=key.__getitem__, reverse=True):
                if (x, y) in given:
                    full[(x, y)] = given[(x, y)]
                    continue
                mid = next(z for z in lower_covers[x] if space.leq(y, z))
                first = given[(x, mid)]
                full[(x, y)] = first if mid == y else full[(mid, y)].compose(first)
        self.maps = full
        self._sections = Memo()
        if check:
            self.validate()

    def validate(self):
        X = self.space
        for (x, y), f in self.maps.items():
            for z in X.down(y) - {y}:
                if self.maps[(y, z)].compose(f) != self.maps[(x, z)]:
                    raise ComplexError(f"comparison maps not functorial along {z!r} < {y!r} < {x!r}")

    def stalk(self, x: Point) -> FreeCochainComplex:
        return self.stalks[x]

    def comparison(self, x: Point, y: Point) -> CochainMap:
        if x == y:
            return self.stalks[x].identity()
        return self.maps[(x, y)]

    def sections(self, U: OpenSet) -> "Sections":
        return self._sections.get(U, lambda: _compute_sections(self, U))

    def restriction(self, U: OpenSet, V: OpenSet) -> CochainMap:
        """Restriction of sections from ``U`` to ``V`` (``V <= U``)."""
        if not V <= U:
            raise ValueError(f"{V!r} is not inside {U!r}")
        SU, SV = self.sections(U), self.sections(V)
        comps = {}
        for q in SU.basis:
            if q in SV.basis:
                comps[q] = SV.left_inverse[q] @ (SU.projection(V, q) @ SU.basis[q])
        return CochainMap(SU.complex, SV.complex, comps)

    @property
    def degrees(self) -> range:
        lo = min((C.lo for C in self.stalks.values() if not C.is_zero()), default=0)
        hi = max((C.hi for C in self.stalks.values() if not C.is_zero()), default=-1)
        return range(lo, hi + 1)

    def __repr__(self) -> str:
        return f"PosetSheaf({self.name}, {self.space!r}, over {self.ring})"


@dataclass(frozen=True)
class Sections:
    """Sections over ``open`` as a complex, with its embedding in the stalk product.

    ``basis[q]`` embeds ``Gamma(U)^q`` into ``prod_{x in U} F_x^q`` (stalks in
    ``points`` order); ``left_inverse[q]`` recovers coordinates.
    """

    open: OpenSet
    complex: FreeCochainComplex
    points: Tuple[Point, ...]
    offsets: Dict[int, Dict[Point, Tuple[int, int]]]
    totals: Dict[int, int]
    basis: Dict[int, ExactMatrix]
    left_inverse: Dict[int, ExactMatrix]
    ring: CoefficientRing

    def projection(self, V: OpenSet, q: int) -> ExactMatrix:
        """Projection of ``prod_{x in U} F_x^q`` onto ``prod_{x in V} F_x^q``
        with V's block layout."""
        pts = [x for x in self.points if x in V]
        rows = {}
        r = 0
        offs = self.offsets.get(q, {})
        for x in pts:
            a, b = offs.get(x, (0, 0))
            for t in range(b - a):
                rows[r] = {a + t: 1}
                r += 1
        return ExactMatrix(self.ring, r, self.totals.get(q, 0), rows)


def _compute_sections(F: PosetSheaf, U: OpenSet) -> Sections:
    X = F.space
    ring = F.ring
    pts = tuple(U)
    pairs = [(x, y) for (y, x) in X.covering_pairs() if x in U]
    degs = sorted({q for x in pts for q in F.stalks[x].degrees()})
    offsets: Dict[int, Dict[Point, Tuple[int, int]]] = {}
    totals = {}
    for q in degs:
        off = 0
        table = {}
        for x in pts:
            r = F.stalks[x].rank(q)
            table[x] = (off, off + r)
            off += r
        offsets[q] = table
        totals[q] = off
    basis: Dict[int, ExactMatrix] = {}
    linv: Dict[int, ExactMatrix] = {}
    for q in degs:
        table = offsets[q]
        col_sizes = [F.stalks[x].rank(q) for x in pts]
        row_sizes = [F.stalks[y].rank(q) for (_, y) in pairs]
        index = {x: a for a, x in enumerate(pts)}
        blocks = {}
        for r, (x, y) in enumerate(pairs):
            blocks[(r, index[x])] = F.maps[(x, y)][q]
            ident = ExactMatrix.identity(ring, F.stalks[y].rank(q))
            blocks[(r, index[y])] = -ident
        diff = block_matrix(ring, row_sizes, col_sizes, blocks)
        K, L = kernel_basis(diff)
        basis[q], linv[q] = K, L
    ranks = {q: basis[q].ncols for q in degs}
    diffs = {}
    for q in degs:
        if q + 1 not in basis:
            continue
        prod_d = block_matrix(ring, [F.stalks[x].rank(q + 1) for x in pts],
                              [F.stalks[x].rank(q) for x in pts],
                              {(a, a): F.stalks[x].d(q) for a, x in enumerate(pts)})
        diffs[q] = linv[q + 1] @ (prod_d @ basis[q])
    C = FreeCochainComplex(ring, ranks, diffs)
    return Sections(U, C, pts, offsets, totals, basis, linv, ring)


def sections(F: PosetSheaf, U: OpenSet) -> FreeCochainComplex:
    """Limit over ``x in U`` of the stalk diagram, degreewise."""
    return F.sections(U).complex


@dataclass(frozen=True)
class SheafMap:
    """A morphism of poset sheaves given stalkwise."""

    source: PosetSheaf
    target: PosetSheaf
    components: Dict[Point, CochainMap]

    def __getitem__(self, x: Point) -> CochainMap:
        return self.components[x]

    def validate(self):
        for (x, y), f in self.source.maps.items():
            g = self.target.maps[(x, y)]
            if self.components[y].compose(f) != g.compose(self.components[x]):
                raise ComplexError(f"sheaf map not natural along {y!r} < {x!r}")


def constant_sheaf(X: FinitePoset, ring: CoefficientRing,
                   base: FreeCochainComplex | None = None) -> PosetSheaf:
    """Stalk ``base`` (default ``R`` in degree 0) everywhere, identity comparisons."""
    if base is None:
        base = FreeCochainComplex.concentrated(ring, 1)
    ident = base.identity()
    return PosetSheaf(X, ring, {x: base for x in X.elements},
                      {(b, a): ident for a, b in X.covering_pairs()}, check=False,
                      name=f"constant({ring})")


def skyscraper(X: FinitePoset, p: Point, ring: CoefficientRing,
               base: FreeCochainComplex | None = None) -> PosetSheaf:
    """``(i_p)_* K``: stalk ``K`` at every ``x >= p``, zero elsewhere."""
    if base is None:
        base = FreeCochainComplex.concentrated(ring, 1)
    zero = FreeCochainComplex.zero(ring)
    stalks = {x: base if X.leq(p, x) else zero for x in X.elements}
    maps = {}
    for a, b in X.covering_pairs():
        src, tgt = stalks[b], stalks[a]
        if src is base and tgt is base:
            maps[(b, a)] = base.identity()
        else:
            maps[(b, a)] = CochainMap(src, tgt, {}, check=False)
    return PosetSheaf(X, ring, stalks, maps, name=f"skyscraper({p})")


def is_flabby(F: PosetSheaf, degree: int, limit: int | None = None) -> bool:
    """Every restriction ``Gamma(X)^k -> Gamma(U)^k`` is onto (exhaustive over opens)."""
    X = F.space
    whole = X.whole
    for U in all_opens(X, limit):
        if U == whole or not U.members:
            continue
        R = F.restriction(whole, U)[degree]
        if R.nrows and not is_surjective(R):
            return False
    return True


def godement_layer0(F: PosetSheaf) -> Tuple[PosetSheaf, SheafMap]:
    """``G_x = prod_{y <= x} F_y`` with projections; the unit is ``s -> (s|_y)_y``."""
    X = F.space
    ring = F.ring
    key = X.rank_key
    down = {x: sorted(X.down(x), key=key.__getitem__) for x in X.elements}
    stalks = {x: direct_sum([F.stalks[y] for y in down[x]], ring) for x in X.elements}
    maps = {}
    for a, b in X.covering_pairs():        # a < b: project G_b onto G_a
        comps = {}
        for q in stalks[b].degrees():
            offs = {}
            off = 0
            for y in down[b]:
                r = F.stalks[y].rank(q)
                offs[y] = (off, r)
                off += r
            rows = {}
            r0 = 0
            for y in down[a]:
                o, r = offs[y]
                for t in range(r):
                    rows[r0 + t] = {o + t: 1}
                r0 += r
            comps[q] = ExactMatrix(ring, stalks[a].rank(q), stalks[b].rank(q), rows)
        maps[(b, a)] = CochainMap(stalks[b], stalks[a], comps, check=False)
    G = PosetSheaf(X, ring, stalks, maps, check=False, name=f"G({F.name})")
    unit = {}
    for x in X.elements:
        comps = {}
        for q in F.stalks[x].degrees():
            comps[q] = vstack([F.comparison(x, y)[q] for y in down[x]])
        unit[x] = CochainMap(F.stalks[x], stalks[x], comps, check=False)
    return G, SheafMap(F, G, unit)
