"""Finite posets as Alexandrov spaces, order complexes and a catalog of test spaces.

Opens are the down-sets: ``U`` is open when ``x in U`` and ``y <= x`` imply
``y in U``.  The smallest open containing ``x`` is ``U_x = {y : y <= x}``.
"""

from __future__ import annotations

import json
import os
import random
import re
from functools import cached_property
from graphlib import CycleError, TopologicalSorter
from itertools import combinations
from typing import Dict, FrozenSet, Hashable, Iterable, List, Sequence, Tuple

from .algebra import CoefficientRing, ExactMatrix, FreeCochainComplex

Point = Hashable

DEFAULT_OPEN_LIMIT = 4096


class InvalidPosetError(ValueError):
    pass


class NotOpenError(ValueError):
    pass


class GuardExceeded(RuntimeError):
    """A resource guard was hit; raise it with ``HYPERSHEAF_GUARD``."""


def guard_limit(default: int) -> int:
    """Resource ceiling, overridable through ``HYPERSHEAF_GUARD``."""
    env = os.environ.get("HYPERSHEAF_GUARD")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"HYPERSHEAF_GUARD must be an integer, got {env!r}") from None
    return default


class FinitePoset:
    """A finite partial order, stored by its reflexive-transitive closure."""

    def __init__(self, elements: Sequence[Point], relation: Iterable[Tuple[Point, Point]] = (),
                 name: str | None = None):
        elements = tuple(elements)
        if len(set(elements)) != len(elements):
            raise InvalidPosetError("duplicate elements")
        self.elements = elements
        self.name = name
        self._index = {x: i for i, x in enumerate(elements)}
        n = len(elements)
        succ: List[set] = [set() for _ in range(n)]
        for a, b in relation:
            if a not in self._index or b not in self._index:
                raise InvalidPosetError(f"relation ({a!r}, {b!r}) references an unknown element")
            ia, ib = self._index[a], self._index[b]
            if ia != ib:
                succ[ia].add(ib)
        ts = TopologicalSorter({i: succ[i] for i in range(n)})
        try:
            order = list(ts.static_order())
        except CycleError as exc:
            cycle = [elements[i] for i in exc.args[1]]
            raise InvalidPosetError(f"relation has a cycle: {' -> '.join(map(str, cycle))}") from None
        # order lists successors first; down-sets accumulate in reverse
        below: List[set] = [{i} for i in range(n)]
        for i in reversed(order):
            for j in succ[i]:
                below[j] |= below[i]
        self._below = tuple(frozenset(b) for b in below)
        above: List[set] = [set() for _ in range(n)]
        for j, b in enumerate(self._below):
            for i in b:
                above[i].add(j)
        self._above = tuple(frozenset(a) for a in above)

    # -- order ---------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return x in self._index

    def index(self, x: Point) -> int:
        try:
            return self._index[x]
        except KeyError:
            raise KeyError(f"unknown point {x!r}") from None

    def leq(self, a: Point, b: Point) -> bool:
        return self.index(a) in self._below[self.index(b)]

    def lt(self, a, b) -> bool:
        return a != b and self.leq(a, b)

    def down(self, x: Point) -> FrozenSet[Point]:
        return frozenset(self.elements[i] for i in self._below[self.index(x)])

    def up(self, x: Point) -> FrozenSet[Point]:
        return frozenset(self.elements[i] for i in self._above[self.index(x)])

    def relation(self) -> FrozenSet[Tuple[Point, Point]]:
        """The full order relation, including ``(x, x)``."""
        return frozenset((self.elements[i], self.elements[j])
                         for j, b in enumerate(self._below) for i in b)

    def covering_pairs(self) -> List[Tuple[Point, Point]]:
        out = []
        for j, b in enumerate(self._below):
            strict = b - {j}
            for i in sorted(strict):
                if not any(i in self._below[k] for k in strict if k != i):
                    out.append((self.elements[i], self.elements[j]))
        return out

    @cached_property
    def linear_extension(self) -> Tuple[Point, ...]:
        """Down-set size strictly grows along ``<``, so sorting by it extends the order."""
        return tuple(sorted(self.elements, key=lambda x: (len(self._below[self._index[x]]), self._index[x])))

    @cached_property
    def rank_key(self) -> Dict[Point, int]:
        return {x: t for t, x in enumerate(self.linear_extension)}

    @cached_property
    def height(self) -> int:
        """Length of the longest strict chain minus one (-1 when empty)."""
        depth: Dict[int, int] = {}
        for x in self.linear_extension:
            i = self._index[x]
            depth[i] = 1 + max((depth[j] for j in self._below[i] if j != i), default=-1)
        return max(depth.values(), default=-1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinitePoset):
            return NotImplemented
        return set(self.elements) == set(other.elements) and self.relation() == other.relation()

    def __hash__(self) -> int:
        return self._hash

    @cached_property
    def _hash(self) -> int:
        return hash((frozenset(self.elements), self.relation()))

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"FinitePoset{label}({len(self)} points, height {self.height})"

    # -- topology -----------------------------------------------------------------

    def is_open(self, members: Iterable[Point]) -> bool:
        s = {self.index(x) for x in members}
        return all(self._below[i] <= s for i in s)

    def open_set(self, members: Iterable[Point]) -> "OpenSet":
        return OpenSet(self, members)

    @property
    def whole(self) -> "OpenSet":
        return OpenSet(self, self.elements, _trusted=True)

    @property
    def empty(self) -> "OpenSet":
        return OpenSet(self, (), _trusted=True)

    def to_json(self) -> dict:
        return {"elements": [_label(x) for x in self.elements],
                "relation": [[_label(a), _label(b)] for a, b in self.covering_pairs()]}


def point_label(x) -> str:
    """Text label of a point; product points render as ``(a,b)``."""
    if isinstance(x, tuple):
        return "(" + ",".join(point_label(y) for y in x) + ")"
    return str(x)


_label = point_label


class OpenSet:
    """A down-set of a :class:`FinitePoset`."""

    __slots__ = ("poset", "members", "_hash")

    def __init__(self, poset: FinitePoset, members: Iterable[Point], *, _trusted: bool = False):
        members = frozenset(members)
        if not _trusted:
            for x in members:
                if x not in poset:
                    raise KeyError(f"unknown point {x!r}")
            for x in members:
                missing = poset.down(x) - members
                if missing:
                    raise NotOpenError(
                        f"{sorted(map(_label, members))} is not open: contains {_label(x)} "
                        f"but not {sorted(map(_label, missing))}")
        self.poset = poset
        self.members = members
        self._hash = hash(members)

    def __contains__(self, x) -> bool:
        return x in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        key = self.poset.rank_key
        return iter(sorted(self.members, key=key.__getitem__))

    def __le__(self, other: "OpenSet") -> bool:
        return self.members <= other.members

    def __lt__(self, other: "OpenSet") -> bool:
        return self.members < other.members

    def __eq__(self, other) -> bool:
        if not isinstance(other, OpenSet):
            return NotImplemented
        return self.members == other.members and (self.poset is other.poset or self.poset == other.poset)

    def __hash__(self) -> int:
        return self._hash

    def __or__(self, other: "OpenSet") -> "OpenSet":
        return OpenSet(self.poset, self.members | other.members, _trusted=True)

    def __and__(self, other: "OpenSet") -> "OpenSet":
        return OpenSet(self.poset, self.members & other.members, _trusted=True)

    def sort_key(self):
        key = self.poset.rank_key
        return (len(self.members), sorted(key[x] for x in self.members))

    def __repr__(self) -> str:
        return "Open{" + ", ".join(_label(x) for x in self) + "}"

    def labels(self) -> List[str]:
        return [_label(x) for x in self]


class OpenCover:
    """An indexed family of opens whose union is ``target``."""

    def __init__(self, target: OpenSet, pieces: Sequence[OpenSet]):
        pieces = tuple(pieces)
        for i, p in enumerate(pieces):
            if not p <= target:
                raise ValueError(f"cover piece {i} {p!r} is not inside {target!r}")
        union = frozenset().union(*(p.members for p in pieces)) if pieces else frozenset()
        if union != target.members:
            raise ValueError(f"pieces do not cover {target!r}; missing "
                             f"{sorted(map(_label, target.members - union))}")
        self.target = target
        self.pieces = pieces

    def __len__(self) -> int:
        return len(self.pieces)

    def intersection(self, indices: Sequence[int]) -> OpenSet:
        out = self.pieces[indices[0]]
        for i in indices[1:]:
            out = out & self.pieces[i]
        return out

    def __repr__(self) -> str:
        return f"OpenCover({self.target!r} <- {list(self.pieces)!r})"


def make_poset(elements, relation_pairs=(), name=None) -> FinitePoset:
    return FinitePoset(elements, relation_pairs, name)


def min_open(X: FinitePoset, x: Point) -> OpenSet:
    """``U_x``, the smallest open containing ``x``."""
    return OpenSet(X, X.down(x), _trusted=True)


def all_opens(X: FinitePoset, limit: int | None = None) -> List[OpenSet]:
    """Every down-set exactly once, ordered by size then position."""
    if limit is None:
        limit = guard_limit(DEFAULT_OPEN_LIMIT)
    order = [X.index(x) for x in X.linear_extension]
    below = X._below
    found: List[FrozenSet[int]] = []

    def grow(pos: int, chosen: FrozenSet[int]):
        if pos == len(order):
            found.append(chosen)
            if len(found) > limit:
                raise GuardExceeded(
                    f"more than {limit} open sets in {X!r}; use the minimal-open mode "
                    f"or raise HYPERSHEAF_GUARD")
            return
        i = order[pos]
        grow(pos + 1, chosen)
        if below[i] - {i} <= chosen:
            grow(pos + 1, chosen | {i})

    grow(0, frozenset())
    opens = [OpenSet(X, (X.elements[i] for i in s), _trusted=True) for s in found]
    opens.sort(key=OpenSet.sort_key)
    return opens


def connected_components(U: OpenSet) -> List[FrozenSet[Point]]:
    """Components of the comparability graph on ``U``."""
    X = U.poset
    left = set(U.members)
    comps = []
    for start in U:
        if start not in left:
            continue
        comp = {start}
        stack = [start]
        left.discard(start)
        while stack:
            x = stack.pop()
            for y in (X.down(x) | X.up(x)):
                if y in left:
                    left.discard(y)
                    comp.add(y)
                    stack.append(y)
        comps.append(frozenset(comp))
    return comps


# -- simplicial complexes ---------------------------------------------------------------


class SimplicialComplex:
    """Finite simplicial complex with a fixed total order on its vertices.

    Simplices are tuples listed in vertex order.
    """

    def __init__(self, vertices: Sequence, simplices: Iterable[Iterable]):
        self.vertices = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertices")
        self._pos = {v: i for i, v in enumerate(self.vertices)}
        closed = set()
        for s in simplices:
            s = self._normalize(s)
            if not s:
                raise ValueError("empty simplex")
            if s in closed:
                continue
            for k in range(1, len(s) + 1):
                closed.update(combinations(s, k))
        for v in self.vertices:
            closed.add((v,))
        by_dim: Dict[int, List[Tuple]] = {}
        for s in closed:
            by_dim.setdefault(len(s) - 1, []).append(s)
        self._by_dim = {k: sorted(v, key=lambda s: [self._pos[x] for x in s]) for k, v in by_dim.items()}
        self._index = {k: {s: i for i, s in enumerate(v)} for k, v in self._by_dim.items()}

    def _normalize(self, s) -> Tuple:
        s = set(s)
        for v in s:
            if v not in self._pos:
                raise ValueError(f"unknown vertex {v!r}")
        return tuple(sorted(s, key=self._pos.__getitem__))

    @classmethod
    def from_facets(cls, vertices, facets) -> "SimplicialComplex":
        return cls(vertices, facets)

    @property
    def dimension(self) -> int:
        return max(self._by_dim, default=-1)

    def simplices(self, k: int) -> List[Tuple]:
        return self._by_dim.get(k, [])

    def all_simplices(self) -> List[Tuple]:
        return [s for k in sorted(self._by_dim) for s in self._by_dim[k]]

    def index(self, simplex) -> int:
        s = self._normalize(simplex)
        return self._index[len(s) - 1][s]

    def __contains__(self, simplex) -> bool:
        try:
            s = self._normalize(simplex)
        except ValueError:
            return False
        return s in self._index.get(len(s) - 1, {})

    def f_vector(self) -> Tuple[int, ...]:
        return tuple(len(self.simplices(k)) for k in range(self.dimension + 1))

    def facets(self) -> List[Tuple]:
        all_s = set(self.all_simplices())
        out = []
        for s in self.all_simplices():
            bigger = [t for t in self.simplices(len(s)) if set(s) <= set(t)]
            if not bigger:
                out.append(s)
        return out

    def position(self, v) -> int:
        return self._pos[v]

    def coboundary(self, k: int, ring: CoefficientRing) -> ExactMatrix:
        """``delta_k : C^k -> C^{k+1}``, ``(delta a)(s) = sum_i (-1)^i a(s minus vertex i)``."""
        src = self.simplices(k)
        tgt = self.simplices(k + 1)
        idx = self._index.get(k, {})
        rows = {}
        for r, s in enumerate(tgt):
            rows[r] = {idx[s[:i] + s[i + 1:]]: (-1) ** i for i in range(len(s))}
        return ExactMatrix(ring, len(tgt), len(src), rows)

    def cochain_complex(self, ring: CoefficientRing) -> FreeCochainComplex:
        dim = self.dimension
        ranks = {k: len(self.simplices(k)) for k in range(dim + 1)}
        diffs = {k: self.coboundary(k, ring) for k in range(dim)}
        return FreeCochainComplex(ring, ranks, diffs)

    def to_json(self) -> dict:
        return {"vertices": [_label(v) for v in self.vertices],
                "facets": [[_label(v) for v in f] for f in self.facets()]}

    def __repr__(self) -> str:
        return f"SimplicialComplex(f={self.f_vector()})"


def order_complex(U: OpenSet) -> SimplicialComplex:
    """Strict chains of the subposet ``U``; vertices ordered by a linear extension."""
    X = U.poset
    verts = list(U)
    pos = X.rank_key
    chains = []
    members = U.members

    def extend(chain):
        chains.append(tuple(chain))
        top = chain[-1]
        for y in sorted(X.up(top) - {top}, key=pos.__getitem__):
            if y in members:
                chain.append(y)
                extend(chain)
                chain.pop()

    for v in verts:
        if not any(X.lt(u, v) for u in members if u != v):
            extend([v])
    return SimplicialComplex(verts, chains)


def face_poset(K: SimplicialComplex) -> FinitePoset:
    """Simplices of ``K`` ordered by inclusion."""
    simplices = K.all_simplices()
    name = {s: ",".join(_label(v) for v in s) for s in simplices}
    rel = []
    for s in simplices:
        if len(s) > 1:
            for i in range(len(s)):
                rel.append((name[s[:i] + s[i + 1:]], name[s]))
    return FinitePoset([name[s] for s in simplices], rel)


def product(P: FinitePoset, Q: FinitePoset) -> FinitePoset:
    """Componentwise order on ``P x Q``."""
    elems = [(p, q) for p in P.elements for q in Q.elements]
    rel = []
    for a, b in P.covering_pairs():
        for q in Q.elements:
            rel.append(((a, q), (b, q)))
    for a, b in Q.covering_pairs():
        for p in P.elements:
            rel.append(((p, a), (p, b)))
    return FinitePoset(elems, rel)


# -- catalog -----------------------------------------------------------------------------

RP2_FACETS = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
              (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3)]

TORUS7_FACETS = ([(i, (i + 1) % 7, (i + 3) % 7) for i in range(7)]
                 + [(i, (i + 2) % 7, (i + 3) % 7) for i in range(7)])


def rp2_triangulation() -> SimplicialComplex:
    """The 6-vertex real projective plane (15 edges, 10 triangles)."""
    return SimplicialComplex(range(6), RP2_FACETS)


def torus_triangulation() -> SimplicialComplex:
    """The 7-vertex torus (21 edges, 14 triangles)."""
    return SimplicialComplex(range(7), TORUS7_FACETS)


def pseudocircle() -> FinitePoset:
    return FinitePoset("abcd", [("c", "a"), ("c", "b"), ("d", "a"), ("d", "b")], "pseudocircle")


def random_poset(seed: int, n: int, edge_prob: float) -> FinitePoset:
    """Forward edges on the fixed order ``0 < 1 < ... < n-1`` only, so no cycles."""
    rng = random.Random(seed)
    rel = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < edge_prob]
    return FinitePoset([str(i) for i in range(n)], [(str(i), str(j)) for i, j in rel],
                       f"random(seed={seed},n={n},p={edge_prob})")


CATALOG_NAMES = ("point", "sierpinski", "pseudocircle", "pseudo_torus", "rp2_face_poset",
                 "torus_face_poset", "discrete(n)", "chain(n)", "random(seed, n, edge_prob)")


def catalog(name: str) -> FinitePoset:
    """A named test space; see :data:`CATALOG_NAMES`."""
    key = name.strip().replace(" ", "")
    if key == "point":
        return FinitePoset(["a"], name="point")
    if key == "sierpinski":
        return FinitePoset(["a", "b"], [("a", "b")], "sierpinski")
    if key == "pseudocircle":
        return pseudocircle()
    if key == "pseudo_torus":
        P = product(pseudocircle(), pseudocircle())
        P.name = "pseudo_torus"
        return P
    if key == "rp2_face_poset":
        P = face_poset(rp2_triangulation())
        P.name = "rp2_face_poset"
        return P
    if key == "torus_face_poset":
        P = face_poset(torus_triangulation())
        P.name = "torus_face_poset"
        return P
    m = re.fullmatch(r"(discrete|chain)\((\d+)\)", key)
    if m:
        n = int(m.group(2))
        pts = [str(i) for i in range(n)]
        if m.group(1) == "discrete":
            return FinitePoset(pts, name=key)
        return FinitePoset(pts, [(pts[i], pts[i + 1]) for i in range(n - 1)], key)
    m = re.fullmatch(r"random\((.*)\)", key)
    if m:
        args = _parse_random_args(m.group(1))
        return random_poset(**args)
    raise KeyError(f"unknown catalog space {name!r}; known: {', '.join(CATALOG_NAMES)}")


def _parse_random_args(text: str) -> dict:
    names = ["seed", "n", "edge_prob"]
    aliases = {"p": "edge_prob"}
    out = {}
    for pos, part in enumerate(p for p in text.split(",") if p):
        if "=" in part:
            k, v = part.split("=", 1)
            k = aliases.get(k, k)
        else:
            k, v = names[pos], part
        if k not in names:
            raise KeyError(f"unknown random() parameter {k!r}")
        out[k] = float(v) if k == "edge_prob" else int(v)
    missing = [k for k in names if k not in out]
    if missing:
        raise KeyError(f"random() needs {', '.join(missing)}")
    return out


# -- JSON ------------------------------------------------------------------------------------


def poset_from_json(data: dict) -> FinitePoset:
    if not isinstance(data, dict) or "elements" not in data:
        raise ValueError("space JSON needs an 'elements' list")
    elements = data["elements"]
    if not isinstance(elements, list) or not all(isinstance(e, str) for e in elements):
        raise ValueError("'elements' must be a list of strings")
    rel = data.get("relation", [])
    if not isinstance(rel, list) or not all(isinstance(p, list) and len(p) == 2 for p in rel):
        raise ValueError("'relation' must be a list of [smaller, larger] pairs")
    return FinitePoset(elements, [tuple(p) for p in rel], data.get("name"))


def complex_from_json(data: dict) -> SimplicialComplex:
    if not isinstance(data, dict) or "vertices" not in data or "facets" not in data:
        raise ValueError("simplicial complex JSON needs 'vertices' and 'facets'")
    return SimplicialComplex(data["vertices"], data["facets"])


def load_space(ref: str) -> FinitePoset:
    """``catalog:<name>`` or a path to a space (or simplicial complex) JSON file."""
    if ref.startswith("catalog:"):
        return catalog(ref[len("catalog:"):])
    with open(ref) as fh:
        data = json.load(fh)
    if isinstance(data, dict) and "facets" in data:
        P = face_poset(complex_from_json(data))
    else:
        P = poset_from_json(data)
    if P.name is None:
        P.name = os.path.basename(ref)
    return P


def resolve_point(X: FinitePoset, label: str) -> Point:
    """Find the point whose label is ``label``."""
    for x in X.elements:
        if _label(x) == label:
            return x
    raise KeyError(f"unknown point {label!r}")


def open_from_labels(X: FinitePoset, labels: Iterable[str]) -> OpenSet:
    return OpenSet(X, [resolve_point(X, l) for l in labels])


def cover_from_json(X: FinitePoset, data) -> OpenCover:
    """``{"target": [...], "pieces": [[...], ...]}`` or a bare list of pieces covering X."""
    if isinstance(data, list):
        pieces = data
        target = None
    elif isinstance(data, dict) and "pieces" in data:
        pieces = data["pieces"]
        target = data.get("target")
    else:
        raise ValueError("cover JSON must be a list of pieces or {'target', 'pieces'}")
    opened = [open_from_labels(X, p) for p in pieces]
    tgt = open_from_labels(X, target) if target is not None else X.whole
    return OpenCover(tgt, opened)
