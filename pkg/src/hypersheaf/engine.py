"""The two cohomology pipelines, Čech descent, and the comparison report.

The singular side is simplicial cochains of the order complex.  The sheaf
side is the totalized Godement resolution of the constant sheaf and never
looks at the order complex of ``X``; its truncation depth comes from the
poset height, which equals the order complex dimension.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Sequence, Tuple

from .algebra import (
    INTEGERS,
    CochainMap,
    CoefficientRing,
    DoubleComplex,
    ExactMatrix,
    FreeCochainComplex,
    GradedAbelianGroup,
    block_matrix,
    cohomology,
    filtered_colimit,
    is_quasi_iso,
    mapping_cone,
    totalize_cosimplicial,
    totalize_double,
)
from .sheaves import (
    GodementTower,
    PosetSheaf,
    PresheafOfComplexes,
    SingularModelPresheaf,
    constant_sheaf,
)
from .spaces import (
    FinitePoset,
    OpenCover,
    OpenSet,
    Point,
    all_opens,
    min_open,
    order_complex,
)

REPORT_SCHEMA = 1


class StabilizationError(RuntimeError):
    """Depths ``N`` and ``N+1`` disagree below ``N``; this is a bug, not a theorem failure."""


# --- singular side -----------------------------------------------------------

def singular_cochains(U: OpenSet, R: CoefficientRing) -> FreeCochainComplex:
    if not U.members:
        return FreeCochainComplex.zero(R)
    return order_complex(U).cochain_complex(R)


def singular_cohomology(U: OpenSet | FinitePoset, R: CoefficientRing = INTEGERS) -> GradedAbelianGroup:
    if isinstance(U, FinitePoset):
        U = U.whole
    return cohomology(singular_cochains(U, R))


def relative_cochains(U: OpenSet, x: Point, R: CoefficientRing) -> FreeCochainComplex:
    """Cochains of the order complex of ``U`` that vanish on the vertex ``x``.

    This is the kernel of the split surjection onto the cochains of the point,
    so it only loses the degree-0 coordinate of ``x``.
    """
    K = order_complex(U)
    C = K.cochain_complex(R)
    keep = [i for i, s in enumerate(K.simplices(0)) if s != (x,)]
    ranks = C.ranks
    ranks[0] = len(keep)
    diffs = {k: C.d(k) for k in C.degrees() if k != 0}
    diffs[0] = C.d(0).submatrix(range(C.rank(1)), keep)
    return FreeCochainComplex(R, ranks, diffs)


def relative_cohomology_at_point(U: OpenSet, x: Point, R: CoefficientRing = INTEGERS) -> GradedAbelianGroup:
    """``H^k(U, x)``: the kernel of ``H^0(U) -> H^0(x)`` in degree 0, ``H^k(U)`` above."""
    if x not in U:
        raise ValueError(f"point {x!r} is not in {U!r}")
    return cohomology(relative_cochains(U, x, R))


@dataclass(frozen=True)
class CLCReport:
    """Per point, the degrees where the relative colimit fails to vanish."""

    ring: CoefficientRing
    max_degree: int
    mode: str
    failures: Dict[Point, Tuple[int, ...]]
    points: Tuple[Point, ...]

    @property
    def passed(self) -> bool:
        return not any(self.failures.values())

    def verdict(self, x: Point) -> Dict[int, bool]:
        bad = set(self.failures.get(x, ()))
        return {k: k not in bad for k in range(self.max_degree + 1)}


def _local_relative(X: FinitePoset, x: Point, R, mode: str, limit: int | None) -> GradedAbelianGroup:
    Ux = min_open(X, x)
    minimal = relative_cohomology_at_point(Ux, x, R)
    if mode == "minimal":
        return minimal
    nbhds = [U for U in all_opens(X, limit) if x in U]
    leq = [(U, V) for U in nbhds for V in nbhds if V <= U]
    complexes = {U: relative_cochains(U, x, R) for U in nbhds}
    maps = {}
    for U, V in leq:
        if U == V:
            continue
        KU, KV = order_complex(U), order_complex(V)
        src, tgt = complexes[U], complexes[V]
        comps = {}
        for k in range(KV.dimension + 1):
            keep_u = [s for s in KU.simplices(k) if s != (x,)]
            col = {s: i for i, s in enumerate(keep_u)}
            keep_v = [s for s in KV.simplices(k) if s != (x,)]
            comps[k] = ExactMatrix(R, len(keep_v), len(keep_u),
                                   {r: {col[s]: 1} for r, s in enumerate(keep_v)})
        maps[(U, V)] = CochainMap(src, tgt, comps, check=False)
    colim = filtered_colimit(nbhds, leq, complexes, maps)
    exhaustive = cohomology(colim.complex)
    if exhaustive != minimal:
        raise AssertionError(f"exhaustive and minimal relative cohomology differ at {x!r}")
    return exhaustive


def is_cohomologically_locally_connected(X: FinitePoset, R: CoefficientRing = INTEGERS,
                                         max_degree: int = 4, mode: str = "minimal",
                                         limit: int | None = None) -> CLCReport:
    if mode not in ("minimal", "exhaustive"):
        raise ValueError(f"unknown mode {mode!r}")
    failures = {}
    for x in X.elements:
        H = _local_relative(X, x, R, mode, limit)
        failures[x] = tuple(k for k in H.degrees() if k <= max_degree)
    return CLCReport(R, max_degree, mode, failures, tuple(X.elements))


def stalkwise_unit_is_quasi_iso(X: FinitePoset, R: CoefficientRing = INTEGERS) -> Dict[Point, bool]:
    """Whether ``R -> C^*(U_x)`` is a quasi-isomorphism at each point."""
    S = SingularModelPresheaf(X, R)
    return {x: is_quasi_iso(S.unit(min_open(X, x))) for x in X.elements}


# --- Čech descent -------------------------------------------------------------

@dataclass
class CechComplex:
    cover: OpenCover
    double: DoubleComplex
    # position (p, q) -> list of index tuples summed there, in block order
    tuples: Dict[int, List[Tuple[int, ...]]]
    total: FreeCochainComplex = field(init=False)

    def __post_init__(self):
        self.total = totalize_double(self.double)


def _nerve(F: PresheafOfComplexes, cover: OpenCover) -> Dict[int, List[Tuple[int, ...]]]:
    out: Dict[int, List[Tuple[int, ...]]] = {}
    n = len(cover)
    for p in range(n):
        for I in combinations(range(n), p + 1):
            V = cover.intersection(I)
            if V.members and not F.evaluate(V).is_zero():
                out.setdefault(p, []).append(I)
    return out


def cech_complex(F: PresheafOfComplexes, cover: OpenCover) -> CechComplex:
    """``C^{p,q} = ∏_{i_0<...<i_p} F^q(V_{i_0...i_p})`` with the alternating Čech differential."""
    R = F.ring
    tuples = _nerve(F, cover)
    values = {I: F.evaluate(cover.intersection(I)) for Is in tuples.values() for I in Is}
    qs = sorted({q for C in values.values() for q in C.degrees() if C.rank(q)})
    ranks, horiz, vert = {}, {}, {}
    for p, Is in tuples.items():
        for q in qs:
            ranks[(p, q)] = sum(values[I].rank(q) for I in Is)
    for p, Is in tuples.items():
        sizes = {q: [values[I].rank(q) for I in Is] for q in qs}
        for q in qs:
            vert[(p, q)] = block_matrix(R, [values[I].rank(q + 1) for I in Is], sizes[q],
                                        {(a, a): values[I].d(q) for a, I in enumerate(Is)})
        nxt = tuples.get(p + 1, [])
        if not nxt:
            continue
        col = {I: a for a, I in enumerate(Is)}
        for q in qs:
            blocks = {}
            for r, J in enumerate(nxt):
                for j in range(len(J)):
                    I = J[:j] + J[j + 1:]
                    if I not in col:
                        continue
                    res = F.restriction(cover.intersection(I), cover.intersection(J))[q]
                    blocks[(r, col[I])] = res if j % 2 == 0 else -res
            horiz[(p, q)] = block_matrix(R, [values[J].rank(q) for J in nxt], sizes[q], blocks)
    D = DoubleComplex(R, ranks, horiz, vert, check=False)
    return CechComplex(cover, D, tuples)


def cech_double_complex(F: PresheafOfComplexes, cover: OpenCover) -> DoubleComplex:
    return cech_complex(F, cover).double


def cech_augmentation(F: PresheafOfComplexes, cech: CechComplex) -> CochainMap:
    """``F(U) -> Tot``: restrict to each piece, landing in the ``p = 0`` column."""
    R = F.ring
    cover = cech.cover
    src = F.evaluate(cover.target)
    tgt = cech.total
    layout = cech.double.total_layout()
    pieces = cech.tuples.get(0, [])
    comps = {}
    for k in src.degrees():
        pos = layout.get(k, [])
        if not pos or src.rank(k) == 0:
            continue
        blocks = {}
        if pos[0] == (0, k):
            rows = []
            for I in pieces:
                rows.append(F.restriction(cover.target, cover.intersection(I))[k])
            col0 = block_matrix(R, [m.nrows for m in rows], [src.rank(k)],
                                {(a, 0): m for a, m in enumerate(rows)})
            blocks[(0, 0)] = col0
        comps[k] = block_matrix(R, [cech.double.rank(*pq) for pq in pos], [src.rank(k)], blocks)
    return CochainMap(src, tgt, comps)


@dataclass(frozen=True)
class DescentVerdict:
    cover: OpenCover
    presheaf_id: str
    augmentation: CochainMap
    cone_cohomology: GradedAbelianGroup

    @property
    def passed(self) -> bool:
        return self.cone_cohomology.is_zero()

    def to_json(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "presheaf": self.presheaf_id,
            "cover": {
                "target": self.cover.target.labels(),
                "pieces": [p.labels() for p in self.cover.pieces],
            },
            "cone_cohomology": self.cone_cohomology.to_json(),
            "pass": self.passed,
        }


def check_descent(F: PresheafOfComplexes, cover: OpenCover) -> DescentVerdict:
    cech = cech_complex(F, cover)
    aug = cech_augmentation(F, cech)
    return DescentVerdict(cover, F.id, aug, cohomology(mapping_cone(aug)))


def enumerate_covers(U: OpenSet, max_pieces: int = 3, opens: Sequence[OpenSet] | None = None,
                     limit: int | None = None) -> List[OpenCover]:
    """Every cover of ``U`` by 1 to ``max_pieces`` distinct nonempty opens inside ``U``.

    Pieces are listed in the canonical open order, so each unordered family
    appears once.
    """
    inside = [V for V in (opens if opens is not None else all_opens(U.poset, limit))
              if V.members and V <= U]
    inside.sort(key=OpenSet.sort_key)
    target = U.members
    out = []
    for r in range(1, max_pieces + 1):
        for family in combinations(inside, r):
            if frozenset().union(*(V.members for V in family)) == target:
                out.append(OpenCover(U, family))
    return out


# --- sheaf side ---------------------------------------------------------------

def default_depth(X: FinitePoset) -> int:
    return max(X.height, 0) + 2


@dataclass(frozen=True)
class Certificate:
    depth: int
    agreed_through: int

    def to_json(self) -> dict:
        return {"depth": self.depth, "agreed_through": self.agreed_through}


@dataclass(frozen=True)
class SheafCohomology:
    groups: GradedAbelianGroup
    certificate: Certificate


def godement_cohomology(F: PosetSheaf, depth: int, normalized: bool = True,
                        max_rank: int | None = None) -> GradedAbelianGroup:
    """Raw cohomology of the depth-``depth`` totalization; valid below ``depth``."""
    tower = GodementTower(F, depth, max_rank)
    return cohomology(totalize_cosimplicial(tower.cosimplicial(), normalized))


def sheaf_cohomology(X: FinitePoset, F: PosetSheaf | None = None, R: CoefficientRing | None = None,
                     depth: int | None = None, normalized: bool = True,
                     max_rank: int | None = None) -> SheafCohomology:
    """``H^*(X, F)`` through the truncated Godement resolution, certified at depth ``N+1``."""
    if F is None:
        F = constant_sheaf(X, R if R is not None else INTEGERS)
    elif R is not None and F.ring != R:
        raise ValueError(f"sheaf is over {F.ring}, requested {R}")
    if depth is None:
        depth = default_depth(X)
    if depth < 1:
        raise ValueError("depth must be at least 1")
    top = depth - 1
    H = godement_cohomology(F, depth, normalized, max_rank).truncate(0, top)
    H_next = godement_cohomology(F, depth + 1, normalized, max_rank).truncate(0, top)
    if H != H_next:
        raise StabilizationError(f"depth {depth} gives {H}, depth {depth + 1} gives {H_next}")
    return SheafCohomology(H, Certificate(depth, top))


# --- comparison ---------------------------------------------------------------

@dataclass(frozen=True)
class ComparisonReport:
    space_id: str
    ring: CoefficientRing
    singular: GradedAbelianGroup
    sheaf: GradedAbelianGroup
    certificate: Certificate

    @property
    def isomorphic(self) -> bool:
        return self.singular == self.sheaf

    def to_json(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "space": self.space_id,
            "ring": self.ring.selector(),
            "singular": self.singular.to_json(),
            "sheaf": self.sheaf.to_json(),
            "verdict": "isomorphic" if self.isomorphic else "not isomorphic",
            "certificate": self.certificate.to_json(),
        }


def compare(X: FinitePoset, R: CoefficientRing = INTEGERS, depth: int | None = None,
            normalized: bool = True) -> ComparisonReport:
    sheaf = sheaf_cohomology(X, constant_sheaf(X, R), depth=depth, normalized=normalized)
    singular = singular_cohomology(X.whole, R).truncate(0, sheaf.certificate.agreed_through)
    return ComparisonReport(X.name, R, singular, sheaf.groups, sheaf.certificate)
