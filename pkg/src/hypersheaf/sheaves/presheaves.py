"""Presheaves of cochain complexes on a finite space.

Each implementation evaluates ``U -> F(U)`` and ``res(U ⊇ V)`` lazily; both
are memoized behind a lock so a presheaf can be shared across workers.
"""

from __future__ import annotations

from typing import Dict, Mapping, Tuple

from ..algebra import (
    CochainMap,
    CoefficientRing,
    ComplexError,
    ExactMatrix,
    FreeCochainComplex,
    Totalization,
    filtered_colimit,
    totalize_cosimplicial_map,
)
from ..spaces import (
    FinitePoset,
    OpenSet,
    Point,
    SimplicialComplex,
    all_opens,
    min_open,
    order_complex,
)
from .godement import GodementTower
from .memo import Memo
from .poset_sheaf import PosetSheaf


class PresheafOfComplexes:
    """Base class: subclasses implement ``_evaluate`` and ``_restrict``."""

    kind = "presheaf"

    def __init__(self, space: FinitePoset, ring: CoefficientRing):
        self.space = space
        self.ring = ring
        self._values = Memo()
        self._maps = Memo()

    @property
    def id(self) -> str:
        return f"{self.kind}({self.ring})"

    def evaluate(self, U: OpenSet) -> FreeCochainComplex:
        return self._values.get(U, lambda: self._evaluate(U))

    def restriction(self, U: OpenSet, V: OpenSet) -> CochainMap:
        if not V <= U:
            raise ValueError(f"{V!r} is not inside {U!r}")
        if U == V:
            return self.evaluate(U).identity()
        return self._maps.get((U, V), lambda: self._restrict(U, V))

    def _evaluate(self, U: OpenSet) -> FreeCochainComplex:
        raise NotImplementedError

    def _restrict(self, U: OpenSet, V: OpenSet) -> CochainMap:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<{self.id} on {self.space!r}>"


class ConstantPresheaf(PresheafOfComplexes):
    """``U -> K`` for nonempty ``U`` (identity restrictions) and ``0`` on the empty set."""

    kind = "constant"

    def __init__(self, space, ring, base: FreeCochainComplex | None = None):
        super().__init__(space, ring)
        self.base = base if base is not None else FreeCochainComplex.concentrated(ring, 1)

    def _evaluate(self, U):
        return self.base if U.members else FreeCochainComplex.zero(self.ring)

    def _restrict(self, U, V):
        if not V.members:
            return CochainMap(self.evaluate(U), self.evaluate(V), {}, check=False)
        return self.base.identity()


class SingularModelPresheaf(PresheafOfComplexes):
    """``U -> C^*(order complex of U)``; restriction keeps the simplices of the smaller complex."""

    kind = "singular"

    def order_complex(self, U: OpenSet) -> SimplicialComplex:
        return self._values.get(("K", U), lambda: order_complex(U))

    def _evaluate(self, U):
        if not U.members:
            return FreeCochainComplex.zero(self.ring)
        return self.order_complex(U).cochain_complex(self.ring)

    def _restrict(self, U, V):
        src, tgt = self.evaluate(U), self.evaluate(V)
        if not V.members:
            return CochainMap(src, tgt, {}, check=False)
        KU, KV = self.order_complex(U), self.order_complex(V)
        comps = {}
        for k in range(KV.dimension + 1):
            rows = {r: {KU.index(s): 1} for r, s in enumerate(KV.simplices(k))}
            comps[k] = ExactMatrix(self.ring, len(KV.simplices(k)), len(KU.simplices(k)), rows)
        return CochainMap(src, tgt, comps)

    def unit(self, U: OpenSet) -> CochainMap:
        """The map ``R -> C^*(U)`` sending 1 to the constant 0-cochain."""
        const = ConstantPresheaf(self.space, self.ring)
        src, tgt = const.evaluate(U), self.evaluate(U)
        n = tgt.rank(0)
        comps = {0: ExactMatrix(self.ring, n, src.rank(0), {i: {0: 1} for i in range(n)})} if U.members else {}
        return CochainMap(src, tgt, comps)


class SheafBacked(PresheafOfComplexes):
    """``U -> Gamma(U, F)`` for a poset sheaf ``F``."""

    kind = "sheaf"

    def __init__(self, sheaf: PosetSheaf):
        super().__init__(sheaf.space, sheaf.ring)
        self.sheaf = sheaf

    @property
    def id(self):
        return f"sheaf:{self.sheaf.name}"

    def _evaluate(self, U):
        return self.sheaf.sections(U).complex

    def _restrict(self, U, V):
        return self.sheaf.restriction(U, V)


class GodementLayer(PresheafOfComplexes):
    """``U -> Gamma(U, G^{n+1} F)``."""

    kind = "godement_layer"

    def __init__(self, tower: GodementTower, n: int):
        super().__init__(tower.space, tower.ring)
        self.tower = tower
        self.n = n

    @property
    def id(self):
        return f"godement_layer({self.n}, {self.tower.base.name})"

    def _evaluate(self, U):
        return self.tower.section_complex(self.n, U)

    def _restrict(self, U, V):
        return self.tower.restriction(self.n, U, V, self.evaluate(U), self.evaluate(V))


class GodementPresheaf(PresheafOfComplexes):
    """``U ->`` the totalized truncated Godement resolution of ``F`` over ``U``."""

    kind = "godement"

    def __init__(self, tower: GodementTower, normalized: bool = True):
        super().__init__(tower.space, tower.ring)
        self.tower = tower
        self.normalized = normalized
        self._tot = Memo()

    @property
    def id(self):
        mode = "normalized" if self.normalized else "unnormalized"
        return f"godement(depth={self.tower.depth}, {mode}, {self.tower.base.name})"

    def totalization(self, U: OpenSet) -> Totalization:
        return self._tot.get(U, lambda: Totalization(self.tower.cosimplicial(U), self.normalized))

    def _evaluate(self, U):
        return self.totalization(U).complex

    def _restrict(self, U, V):
        TU, TV = self.totalization(U), self.totalization(V)
        levels = [self.tower.restriction(n, U, V, TU.source.objects[n], TV.source.objects[n])
                  for n in range(self.tower.depth + 1)]
        return totalize_cosimplicial_map(levels, TU, TV)


class TableBacked(PresheafOfComplexes):
    """Explicit finite table of values and restriction maps.

    Opens missing from ``values`` evaluate to zero.  Restrictions must be
    listed for every pair that is used, except identities and maps into or
    out of zero complexes.
    """

    kind = "table"

    def __init__(self, space, ring, values: Mapping[OpenSet, FreeCochainComplex],
                 restrictions: Mapping[Tuple[OpenSet, OpenSet], CochainMap]):
        super().__init__(space, ring)
        self.values = dict(values)
        self.restrictions = dict(restrictions)

    def _evaluate(self, U):
        return self.values.get(U, FreeCochainComplex.zero(self.ring))

    def _restrict(self, U, V):
        f = self.restrictions.get((U, V))
        src, tgt = self.evaluate(U), self.evaluate(V)
        if f is None:
            if src.is_zero() or tgt.is_zero():
                return CochainMap(src, tgt, {}, check=False)
            raise KeyError(f"table has no restriction {U!r} -> {V!r}")
        return f

    def validate(self, opens=None):
        """Identity and composition laws on all triples of the given opens."""
        opens = list(opens) if opens is not None else all_opens(self.space)
        for U in opens:
            for V in opens:
                if not V <= U:
                    continue
                for W in opens:
                    if W <= V:
                        lhs = self.restriction(V, W).compose(self.restriction(U, V))
                        if lhs != self.restriction(U, W):
                            raise ComplexError(f"restrictions do not compose along {U!r} ⊇ {V!r} ⊇ {W!r}")


def stalk(F: PresheafOfComplexes, x: Point, mode: str = "minimal",
          limit: int | None = None) -> FreeCochainComplex:
    """Colimit of ``F`` over the opens containing ``x``.

    ``minimal`` evaluates at ``U_x``.  ``exhaustive`` forms the diagram of every
    open containing ``x`` and takes its filtered colimit, checking that it
    agrees with the minimal one.
    """
    Ux = min_open(F.space, x)
    if mode == "minimal":
        return F.evaluate(Ux)
    if mode != "exhaustive":
        raise ValueError(f"unknown stalk mode {mode!r}")
    nbhds = [U for U in all_opens(F.space, limit) if x in U]
    # U precedes V in the neighbourhood filter when V ⊆ U
    leq = [(U, V) for U in nbhds for V in nbhds if V <= U]
    complexes = {U: F.evaluate(U) for U in nbhds}
    maps = {(U, V): F.restriction(U, V) for U, V in leq}
    colim = filtered_colimit(nbhds, leq, complexes, maps)
    if colim.apex != Ux:
        raise AssertionError(f"neighbourhood filter of {x!r} peaks at {colim.apex!r}, not at U_x")
    value = F.evaluate(Ux)
    if colim.complex != value:
        raise AssertionError("exhaustive and minimal stalks disagree")
    return colim.complex


def sheafify(F: PresheafOfComplexes) -> PosetSheaf:
    """Stalks ``F(U_x)`` with the restrictions between minimal opens."""
    X = F.space
    stalks = {x: F.evaluate(min_open(X, x)) for x in X.elements}
    maps = {(b, a): F.restriction(min_open(X, b), min_open(X, a)) for a, b in X.covering_pairs()}
    return PosetSheaf(X, F.ring, stalks, maps, check=False, name=f"sheafify({F.id})")
