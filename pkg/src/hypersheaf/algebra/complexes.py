"""Bounded cochain complexes of free modules, their maps and cohomology."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .lattice import subquotient_invariants
from .matrix import ExactMatrix, block_matrix
from .rings import CoefficientRing
from .smith import smith_diagonal


class ComplexError(ValueError):
    """Malformed complex or cochain map."""


class FreeCochainComplex:
    """``0 -> R^{n_lo} -> ... -> R^{n_hi} -> 0`` with explicit differentials.

    ``ranks`` maps degree to rank; ``differentials[k]`` is the matrix of
    ``d_k : C^k -> C^{k+1}`` (shape ``n_{k+1} x n_k``).  Missing differentials are
    zero.  ``d_{k+1} d_k == 0`` is checked exactly unless ``check=False``.
    """

    __slots__ = ("ring", "lo", "hi", "_ranks", "_diffs")

    def __init__(self, ring: CoefficientRing, ranks: Mapping[int, int],
                 differentials: Mapping[int, ExactMatrix] | None = None, *, check: bool = True):
        self.ring = ring
        nz = {k: int(v) for k, v in ranks.items() if v}
        if any(v < 0 for v in nz.values()):
            raise ComplexError("negative rank")
        self._ranks = nz
        if nz:
            self.lo, self.hi = min(nz), max(nz)
        else:
            self.lo, self.hi = 0, -1
        diffs = {}
        for k, d in (differentials or {}).items():
            if d.ring != ring:
                raise ComplexError(f"differential d_{k} over {d.ring}, complex over {ring}")
            if d.shape != (self.rank(k + 1), self.rank(k)):
                raise ComplexError(f"d_{k} has shape {d.shape}, expected "
                                   f"{(self.rank(k + 1), self.rank(k))}")
            if not d.is_zero():
                diffs[k] = d
        self._diffs = diffs
        if check:
            for k in diffs:
                if k + 1 in diffs and not (diffs[k + 1] @ diffs[k]).is_zero():
                    raise ComplexError(f"d_{k + 1} d_{k} != 0")

    @classmethod
    def zero(cls, ring) -> "FreeCochainComplex":
        return cls(ring, {})

    @classmethod
    def concentrated(cls, ring, rank: int, degree: int = 0) -> "FreeCochainComplex":
        return cls(ring, {degree: rank})

    def rank(self, k: int) -> int:
        return self._ranks.get(k, 0)

    def d(self, k: int) -> ExactMatrix:
        m = self._diffs.get(k)
        if m is None:
            return ExactMatrix.zeros(self.ring, self.rank(k + 1), self.rank(k))
        return m

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    @property
    def ranks(self) -> Dict[int, int]:
        return dict(self._ranks)

    @property
    def total_rank(self) -> int:
        return sum(self._ranks.values())

    def is_zero(self) -> bool:
        return not self._ranks

    def __eq__(self, other) -> bool:
        if not isinstance(other, FreeCochainComplex):
            return NotImplemented
        return (self.ring == other.ring and self._ranks == other._ranks
                and self._diffs == other._diffs)

    def __hash__(self):
        return hash((self.ring, tuple(sorted(self._ranks.items()))))

    def __repr__(self) -> str:
        ranks = ", ".join(f"{k}:{v}" for k, v in sorted(self._ranks.items()))
        return f"FreeCochainComplex({self.ring}, {{{ranks}}})"

    def shift(self, n: int) -> "FreeCochainComplex":
        """``C[n]`` with ``C[n]^k = C^{k+n}`` and differential ``(-1)^n d``."""
        sign = -1 if n % 2 else 1
        return FreeCochainComplex(self.ring, {k - n: v for k, v in self._ranks.items()},
                                  {k - n: d.scale(sign) for k, d in self._diffs.items()},
                                  check=False)

    def identity(self) -> "CochainMap":
        return CochainMap(self, self, {k: ExactMatrix.identity(self.ring, self.rank(k))
                                       for k in self.degrees()}, check=False)

    def to_json(self) -> dict:
        return {
            "ring": self.ring.selector(),
            "ranks": {str(k): v for k, v in sorted(self._ranks.items())},
            "differentials": {str(k): d.to_json() for k, d in sorted(self._diffs.items())},
        }

    @classmethod
    def from_json(cls, data: dict) -> "FreeCochainComplex":
        ring = CoefficientRing.parse(data["ring"])
        ranks = {int(k): int(v) for k, v in data["ranks"].items()}
        diffs = {int(k): ExactMatrix.from_json(ring, m)
                 for k, m in data.get("differentials", {}).items()}
        return cls(ring, ranks, diffs)


def direct_sum(parts: Sequence[FreeCochainComplex], ring: CoefficientRing | None = None) -> FreeCochainComplex:
    """Direct sum with summands stacked in the given order."""
    if not parts:
        return FreeCochainComplex.zero(ring)
    ring = parts[0].ring
    degs = sorted({k for p in parts for k in p.degrees()})
    ranks = {k: sum(p.rank(k) for p in parts) for k in degs}
    diffs = {}
    for k in degs:
        blocks = {(a, a): p.d(k) for a, p in enumerate(parts)}
        diffs[k] = block_matrix(ring, [p.rank(k + 1) for p in parts],
                                [p.rank(k) for p in parts], blocks)
    return FreeCochainComplex(ring, ranks, diffs, check=False)


class CochainMap:
    """Degreewise matrices ``f_k : C^k -> D^k`` commuting with the differentials."""

    __slots__ = ("source", "target", "_comps")

    def __init__(self, source: FreeCochainComplex, target: FreeCochainComplex,
                 components: Mapping[int, ExactMatrix], *, check: bool = True):
        if source.ring != target.ring:
            raise ComplexError("cochain map between complexes over different rings")
        self.source = source
        self.target = target
        comps = {}
        for k, f in components.items():
            if f.shape != (target.rank(k), source.rank(k)):
                raise ComplexError(f"component f_{k} has shape {f.shape}, expected "
                                   f"{(target.rank(k), source.rank(k))}")
            if f.ring != source.ring:
                raise ComplexError(f"component f_{k} over {f.ring}")
            if not f.is_zero():
                comps[k] = f
        self._comps = comps
        if check:
            degs = set(source.degrees()) | set(target.degrees())
            for k in degs:
                if self[k + 1] @ source.d(k) != target.d(k) @ self[k]:
                    raise ComplexError(f"map does not commute with differentials in degree {k}")

    def __getitem__(self, k: int) -> ExactMatrix:
        f = self._comps.get(k)
        if f is None:
            return ExactMatrix.zeros(self.source.ring, self.target.rank(k), self.source.rank(k))
        return f

    @property
    def components(self) -> Dict[int, ExactMatrix]:
        return dict(self._comps)

    def compose(self, first: "CochainMap") -> "CochainMap":
        """``self ∘ first``."""
        degs = set(first.source.degrees())
        return CochainMap(first.source, self.target,
                          {k: self[k] @ first[k] for k in degs}, check=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CochainMap):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self._comps == other._comps)

    __hash__ = None


@dataclass(frozen=True)
class GradedAbelianGroup:
    """Per-degree ``(free rank, torsion)``; zero degrees are dropped.

    Over Z the torsion is the list of invariant factors > 1.  Over Z/m the
    free rank counts Z/m summands and the torsion lists the other cyclic
    summands Z/d (1 < d < m, d | m).  Over Q the torsion is always empty.
    """

    groups: Tuple[Tuple[int, int, Tuple[int, ...]], ...] = ()
    ring: Optional[CoefficientRing] = field(default=None, compare=False)

    @classmethod
    def from_dict(cls, data: Mapping[int, Tuple[int, Sequence[int]]], ring=None) -> "GradedAbelianGroup":
        items = []
        for k in sorted(data):
            r, t = data[k]
            t = tuple(sorted(t))
            for a, b in zip(t, t[1:]):
                if b % a:
                    raise ValueError(f"torsion {t} in degree {k} is not a divisor chain")
            if r or t:
                items.append((k, int(r), t))
        return cls(tuple(items), ring)

    def __getitem__(self, k: int) -> Tuple[int, Tuple[int, ...]]:
        for deg, r, t in self.groups:
            if deg == k:
                return r, t
        return 0, ()

    def rank(self, k: int) -> int:
        return self[k][0]

    def torsion(self, k: int) -> Tuple[int, ...]:
        return self[k][1]

    def degrees(self) -> List[int]:
        return [k for k, _, _ in self.groups]

    def is_zero(self) -> bool:
        return not self.groups

    def truncate(self, lo: int, hi: int) -> "GradedAbelianGroup":
        return GradedAbelianGroup(tuple(g for g in self.groups if lo <= g[0] <= hi), self.ring)

    def ranks_through(self, top: int, bottom: int = 0) -> Tuple[int, ...]:
        return tuple(self.rank(k) for k in range(bottom, top + 1))

    def render(self, k: int) -> str:
        """Text form such as ``Z^2 + Z/2``."""
        r, t = self[k]
        base = str(self.ring) if self.ring is not None else "R"
        parts = []
        if r == 1:
            parts.append(base)
        elif r > 1:
            parts.append(f"({base})^{r}" if "/" in base else f"{base}^{r}")
        parts.extend(f"Z/{d}" for d in t)
        return " + ".join(parts) if parts else "0"

    def __str__(self) -> str:
        if not self.groups:
            return "0"
        return ", ".join(f"H^{k} = {self.render(k)}" for k in self.degrees())

    def to_json(self) -> dict:
        return {str(k): {"rank": r, "torsion": list(t)} for k, r, t in self.groups}

    @classmethod
    def from_json(cls, data: Mapping[str, dict], ring=None) -> "GradedAbelianGroup":
        return cls.from_dict({int(k): (v["rank"], v["torsion"]) for k, v in data.items()}, ring)


def cohomology(C: FreeCochainComplex) -> GradedAbelianGroup:
    """``H^k = ker d_k / im d_{k-1}`` for every degree of the support."""
    out = {}
    ring = C.ring
    if ring.kind == "Zmod":
        for k in C.degrees():
            if C.rank(k):
                out[k] = subquotient_invariants(C.d(k), C.d(k - 1), ring)
        return GradedAbelianGroup.from_dict(out, ring)
    # over Z and Q only the invariant factors of each differential matter
    diag = {k: smith_diagonal(C.d(k)) for k in C.degrees()}
    for k in C.degrees():
        if C.rank(k):
            prev = diag.get(k - 1, ())
            free = C.rank(k) - len(diag[k]) - len(prev)
            tors = tuple(x for x in prev if x > 1) if ring.kind == "Z" else ()
            out[k] = (free, tors)
    return GradedAbelianGroup.from_dict(out, ring)


def mapping_cone(f: CochainMap) -> FreeCochainComplex:
    """``Cone(f)^k = C^{k+1} ⊕ D^k`` with ``d(c, x) = (-d_C c, f c + d_D x)``."""
    C, D = f.source, f.target
    ring = C.ring
    degs = sorted(set(k - 1 for k in C.degrees()) | set(D.degrees()))
    ranks = {k: C.rank(k + 1) + D.rank(k) for k in degs}
    diffs = {}
    for k in degs:
        blocks = {
            (0, 0): -C.d(k + 1),
            (1, 0): f[k + 1],
            (1, 1): D.d(k),
        }
        diffs[k] = block_matrix(ring, [C.rank(k + 2), D.rank(k + 1)],
                                [C.rank(k + 1), D.rank(k)], blocks)
    return FreeCochainComplex(ring, ranks, diffs)


def is_acyclic(C: FreeCochainComplex) -> bool:
    return cohomology(C).is_zero()


def is_quasi_iso(f: CochainMap) -> bool:
    """True iff the mapping cone of ``f`` is acyclic."""
    return is_acyclic(mapping_cone(f))


@dataclass(frozen=True)
class Colimit:
    apex: object
    complex: FreeCochainComplex
    legs: Dict[object, CochainMap]


class NotDirectedError(ValueError):
    pass


def filtered_colimit(objects: Sequence, leq: Iterable[Tuple[object, object]],
                     complexes: Mapping[object, FreeCochainComplex],
                     maps: Mapping[Tuple[object, object], CochainMap]) -> Colimit:
    """Colimit of a diagram over a finite directed poset.

    A finite directed poset has a maximum; the colimit is the value there and
    the legs are the structure maps into it (identity at the apex).
    ``leq`` must contain the full order relation; ``maps[(a, b)]`` is the map
    for ``a <= b``.
    """
    objs = list(objects)
    if not objs:
        raise NotDirectedError("empty diagram is not directed")
    rel = set(leq) | {(a, a) for a in objs}
    tops = [m for m in objs if all((a, m) in rel for a in objs)]
    if not tops:
        raise NotDirectedError("diagram has no maximum; index poset is not directed")
    apex = tops[0]
    legs = {}
    for a in objs:
        if a == apex:
            legs[a] = complexes[apex].identity()
        else:
            legs[a] = maps[(a, apex)]
    return Colimit(apex, complexes[apex], legs)
