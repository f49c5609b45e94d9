"""Cup and cup-1 products on simplicial cochains, and the cohomology ring.

Cochains live on a :class:`SimplicialComplex` whose vertex order is fixed at
construction; every simplex is read in that order.

Sign convention for cup-1 (Steenrod's), with ``a`` of degree ``p`` and ``b``
of degree ``q`` evaluated on ``(v_0 ... v_n)``, ``n = p + q - 1``::

    (a ∪₁ b)(v_0..v_n) = sum_{i=0}^{n-q} (-1)^{(p-i)(q+1)} a(v_0..v_i, v_{i+q}..v_n) b(v_i..v_{i+q})

which satisfies, exactly over Z,

    δ(a ∪₁ b) = (-1)^{p+q-1} a∪b + (-1)^{pq+p+q} b∪a + δa ∪₁ b + (-1)^p a ∪₁ δb.

For cocycles this reads ``a∪b - (-1)^{pq} b∪a = δ((-1)^{p+q-1} a ∪₁ b)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable, Dict, List, Mapping, Sequence, Tuple

from .algebra import (
    INTEGERS,
    CoefficientRing,
    ExactMatrix,
    SubquotientBasis,
    RATIONALS,
    rank,
    smith_diagonal,
    subquotient_basis,
)
from .spaces import FinitePoset, OpenSet, SimplicialComplex, order_complex


def _same_complex(K: SimplicialComplex, L: SimplicialComplex) -> bool:
    if K is L:
        return True
    return K.vertices == L.vertices and K.all_simplices() == L.all_simplices()


class Cochain:
    """A degree-``k`` cochain: one ring value per ``k``-simplex, in the complex's simplex order."""

    __slots__ = ("complex", "degree", "ring", "values")

    def __init__(self, K: SimplicialComplex, degree: int, values: Sequence, ring: CoefficientRing = INTEGERS):
        if degree < 0:
            raise ValueError(f"negative cochain degree {degree}")
        values = tuple(values)
        n = len(K.simplices(degree))
        if len(values) != n:
            raise ValueError(f"degree-{degree} cochain needs {n} values, got {len(values)}")
        self.complex = K
        self.degree = degree
        self.ring = ring
        self.values = tuple(ring.reduce(v) for v in values)

    @classmethod
    def zero(cls, K, degree, ring=INTEGERS) -> "Cochain":
        return cls(K, degree, [0] * len(K.simplices(degree)), ring)

    @classmethod
    def unit(cls, K, ring=INTEGERS) -> "Cochain":
        """The constant function 1 on vertices."""
        return cls(K, 0, [1] * len(K.simplices(0)), ring)

    @classmethod
    def from_function(cls, K, degree, f: Callable[[Tuple], object], ring=INTEGERS) -> "Cochain":
        return cls(K, degree, [f(s) for s in K.simplices(degree)], ring)

    @classmethod
    def from_mapping(cls, K, degree, values: Mapping[Tuple, object], ring=INTEGERS) -> "Cochain":
        """Values keyed by simplex; unlisted simplices are zero."""
        out = [0] * len(K.simplices(degree))
        for s, v in values.items():
            if len(tuple(s)) != degree + 1 or s not in K:
                raise ValueError(f"{s!r} is not a {degree}-simplex of the complex")
            out[K.index(s)] = v
        return cls(K, degree, out, ring)

    def __call__(self, simplex) -> object:
        return self.values[self.complex.index(simplex)]

    def _check(self, other: "Cochain"):
        if not isinstance(other, Cochain):
            raise TypeError(f"expected a Cochain, got {type(other).__name__}")
        if other.ring != self.ring:
            raise ValueError(f"cochains over {self.ring} and {other.ring}")
        if not _same_complex(self.complex, other.complex):
            raise ValueError("cochains live on different complexes")

    def __add__(self, other: "Cochain") -> "Cochain":
        self._check(other)
        if other.degree != self.degree:
            raise ValueError("cannot add cochains of different degrees")
        return Cochain(self.complex, self.degree, [a + b for a, b in zip(self.values, other.values)], self.ring)

    def __neg__(self) -> "Cochain":
        return Cochain(self.complex, self.degree, [-a for a in self.values], self.ring)

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + (-other)

    def scale(self, c) -> "Cochain":
        return Cochain(self.complex, self.degree, [c * a for a in self.values], self.ring)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cochain):
            return NotImplemented
        return (self.degree == other.degree and self.ring == other.ring
                and self.values == other.values and _same_complex(self.complex, other.complex))

    __hash__ = None

    def is_zero(self) -> bool:
        return not any(self.values)

    def coboundary(self) -> "Cochain":
        K, k = self.complex, self.degree
        idx = {s: i for i, s in enumerate(K.simplices(k))}
        out = []
        for s in K.simplices(k + 1):
            out.append(sum((-1) ** i * self.values[idx[s[:i] + s[i + 1:]]] for i in range(len(s))))
        return Cochain(K, k + 1, out, self.ring)

    def is_cocycle(self) -> bool:
        return self.coboundary().is_zero()

    def __repr__(self) -> str:
        return f"Cochain(degree={self.degree}, {self.ring}, nonzero={sum(1 for v in self.values if v)})"


def _operands(K: SimplicialComplex, a: Cochain, b: Cochain):
    for c in (a, b):
        if not isinstance(c, Cochain):
            raise TypeError(f"expected a Cochain, got {type(c).__name__}")
        if not _same_complex(K, c.complex):
            raise ValueError("cochain does not live on this complex")
    if a.ring != b.ring:
        raise ValueError(f"cochains over {a.ring} and {b.ring}")


def cup(K: SimplicialComplex, a: Cochain, b: Cochain) -> Cochain:
    """Alexander-Whitney: ``(a∪b)(v_0..v_{p+q}) = a(v_0..v_p) b(v_p..v_{p+q})``."""
    _operands(K, a, b)
    p, q = a.degree, b.degree
    ia = {s: i for i, s in enumerate(K.simplices(p))}
    ib = {s: i for i, s in enumerate(K.simplices(q))}
    out = []
    for s in K.simplices(p + q):
        out.append(a.values[ia[s[:p + 1]]] * b.values[ib[s[p:]]])
    return Cochain(K, p + q, out, a.ring)


def cup1(K: SimplicialComplex, a: Cochain, b: Cochain) -> Cochain:
    """Steenrod's cup-1 product, of degree ``p + q - 1``; see the module docstring for signs."""
    _operands(K, a, b)
    p, q = a.degree, b.degree
    n = p + q - 1
    if n < 0:
        raise ValueError("cup-1 of two degree-0 cochains has degree -1")
    if p == 0 or q == 0:
        return Cochain.zero(K, n, a.ring)
    ia = {s: i for i, s in enumerate(K.simplices(p))}
    ib = {s: i for i, s in enumerate(K.simplices(q))}
    out = []
    for s in K.simplices(n):
        total = 0
        for i in range(n - q + 1):
            front = s[:i + 1] + s[i + q:]
            back = s[i:i + q + 1]
            term = a.values[ia[front]] * b.values[ib[back]]
            total += -term if ((p - i) * (q + 1)) % 2 else term
        out.append(total)
    return Cochain(K, n, out, a.ring)


def commutativity_primitive(K: SimplicialComplex, a: Cochain, b: Cochain) -> Cochain:
    """``h`` with ``δh = a∪b - (-1)^{pq} b∪a`` whenever ``a`` and ``b`` are cocycles."""
    h = cup1(K, a, b)
    return -h if (a.degree + b.degree - 1) % 2 else h


@dataclass(frozen=True)
class CohomologyRing:
    """Basis of ``H^*`` and cup structure constants on basis classes.

    ``structure[(p, i), (q, j)]`` is the coordinate vector of ``x^p_i ∪ x^q_j``
    against the degree ``p + q`` basis.  ``orders`` follows
    :class:`SubquotientBasis`: 0 marks a free class over Z or Q.
    """

    ring: CoefficientRing
    complex: SimplicialComplex
    orders: Dict[int, Tuple[int, ...]]
    representatives: Dict[int, Tuple[Cochain, ...]]
    structure: Dict[Tuple[Tuple[int, int], Tuple[int, int]], Tuple]
    classes: Dict[int, SubquotientBasis] = field(repr=False, compare=False, default_factory=dict)

    @property
    def degrees(self) -> List[int]:
        return sorted(k for k, o in self.orders.items() if o)

    def dimension(self, k: int) -> int:
        return len(self.orders.get(k, ()))

    def product(self, p: int, x: Sequence, q: int, y: Sequence) -> Tuple:
        """Cup of classes given by coordinates in degrees ``p`` and ``q``."""
        n = self.dimension(p + q)
        out = [0] * n
        for i, u in enumerate(x):
            if not u:
                continue
            for j, v in enumerate(y):
                if not v:
                    continue
                for t, c in enumerate(self.structure[(p, i), (q, j)]):
                    out[t] += u * v * c
        return self._normalize(p + q, out)

    def _normalize(self, k: int, vec) -> Tuple:
        out = []
        for v, o in zip(vec, self.orders.get(k, ())):
            v = self.ring.reduce(v) if self.ring.kind != "Z" else v
            out.append(v % o if o else v)
        return tuple(out)

    def unit(self) -> Tuple:
        """Coordinates of the class of the constant cochain 1."""
        K = self.complex
        return self.classes[0].coordinates(Cochain.unit(K, self.ring).values)

    def pairing_rank(self, p: int, q: int) -> int:
        """Rank of the span of ``H^p ∪ H^q`` inside the free part of ``H^{p+q}``.

        Over Z the rank is taken over Q.  Over Z/m it counts the Z/m summands
        the products span (the field rank when m is prime).
        """
        ring = self.ring
        top = ring.modulus if ring.kind == "Zmod" else 0
        free = [t for t, o in enumerate(self.orders.get(p + q, ())) if o == top]
        cols = [[self.structure[(p, i), (q, j)][t] for t in free]
                for i in range(self.dimension(p)) for j in range(self.dimension(q))]
        if not cols or not free:
            return 0
        entries = {r: {c: col[r] for c, col in enumerate(cols) if col[r]} for r in range(len(free))}
        if ring.kind == "Zmod" and not ring.is_field:
            M = ExactMatrix(INTEGERS, len(free), len(cols), entries)
            return sum(1 for d in smith_diagonal(M) if gcd(d, ring.modulus) == 1)
        return rank(ExactMatrix(RATIONALS if ring.kind == "Z" else ring, len(free), len(cols), entries))

    def to_json(self) -> dict:
        table = []
        for ((p, i), (q, j)), vec in sorted(self.structure.items()):
            if any(vec):
                table.append({"left": [p, i], "right": [q, j], "product": [_jsonable(v) for v in vec]})
        return {
            "schema": 1,
            "ring": self.ring.selector(),
            "basis": {str(k): list(self.orders[k]) for k in self.degrees},
            "structure_constants": table,
        }


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    return v


def cohomology_ring(X: FinitePoset | OpenSet | SimplicialComplex, R: CoefficientRing = INTEGERS) -> CohomologyRing:
    """Cup structure of ``H^*`` of the order complex of ``X`` (or of ``X`` itself if simplicial)."""
    if isinstance(X, SimplicialComplex):
        K = X
    else:
        U = X.whole if isinstance(X, FinitePoset) else X
        K = order_complex(U)
    classes: Dict[int, SubquotientBasis] = {}
    for k in range(K.dimension + 1):
        d = K.coboundary(k, R)
        d_prev = K.coboundary(k - 1, R) if k else ExactMatrix.zeros(R, len(K.simplices(0)), 0)
        classes[k] = subquotient_basis(d, d_prev, R)
    orders = {k: B.orders for k, B in classes.items()}
    reps = {k: tuple(Cochain(K, k, g, R) for g in B.generators) for k, B in classes.items()}
    structure = {}
    for p, xs in reps.items():
        for q, ys in reps.items():
            for i, x in enumerate(xs):
                for j, y in enumerate(ys):
                    c = cup(K, x, y)
                    if p + q in classes:
                        structure[(p, i), (q, j)] = classes[p + q].coordinates(c.values)
                    else:
                        structure[(p, i), (q, j)] = ()
    return CohomologyRing(R, K, orders, reps, structure, classes)
