"""Kernels and subquotients of free modules, computed through integer lattices.

Every module here is a finite-rank free module over Z, Q or Z/m.  A
submodule is handled through an integer lattice: over Z it is the module
itself, over Q a full-rank lattice in it, over Z/m its preimage in Z^n
(which contains m Z^n).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import List, Sequence, Tuple

from .matrix import ExactMatrix, hstack
from .rings import INTEGERS, CoefficientRing
from .smith import smith_decomposition, smith_diagonal


class NonFreeKernelError(ValueError):
    """A kernel over Z/m turned out not to be a free Z/m-module."""


def _lift(A: ExactMatrix) -> ExactMatrix:
    return A.integer_rows() if A.ring.kind == "Q" else A.change_ring(INTEGERS)


def kernel_basis(A: ExactMatrix) -> Tuple[ExactMatrix, ExactMatrix]:
    """Basis ``K`` (as columns) of ``ker A`` and a left inverse ``L`` with ``L @ K == I``.

    ``L`` applied to any kernel element returns its coordinates.  Over Z the
    basis spans a saturated sublattice.  Over Z/m a non-free kernel raises
    :class:`NonFreeKernelError`.
    """
    ring = A.ring
    n = A.ncols
    f = smith_decomposition(_lift(A), inverses=True)
    r = f.rank
    if ring.kind == "Zmod":
        m = ring.modulus
        keep = []
        for i, d in enumerate(f.diagonal):
            g = gcd(d, m)
            if g == m:
                keep.append(i)
            elif g != 1:
                raise NonFreeKernelError(
                    f"kernel over {ring} has a Z/{m // g} summand; not free")
        keep.extend(range(r, n))
    else:
        keep = list(range(r, n))
    K = f.V.submatrix(range(n), keep).change_ring(ring)
    L = f.V_inv.submatrix(keep, range(n)).change_ring(ring)
    return K, L


def restrict(A: ExactMatrix, K_src: ExactMatrix, L_tgt: ExactMatrix) -> ExactMatrix:
    """The matrix of ``A`` restricted to ``span(K_src)``, in target coordinates."""
    return L_tgt @ (A @ K_src)


def rank(A: ExactMatrix) -> int:
    """Rank over Z, Q or a prime field Z/p."""
    if A.ring.kind == "Zmod" and not A.ring.is_field:
        raise ValueError("rank is only defined here over Z, Q and prime Z/p")
    if A.ring.kind == "Zmod":
        p = A.ring.modulus
        return sum(1 for d in smith_diagonal(_lift(A)) if d % p)
    return len(smith_diagonal(_lift(A)))


def is_surjective(A: ExactMatrix) -> bool:
    """Whether ``A`` maps onto its codomain (all invariant factors units)."""
    ring = A.ring
    diag = smith_diagonal(_lift(A))
    if ring.kind == "Q":
        return len(diag) == A.nrows
    if ring.kind == "Z":
        return len(diag) == A.nrows and all(d == 1 for d in diag)
    m = ring.modulus
    return sum(1 for d in diag if gcd(d, m) == 1) == A.nrows


def is_injective(A: ExactMatrix) -> bool:
    ring = A.ring
    diag = smith_diagonal(_lift(A))
    if ring.kind == "Zmod":
        m = ring.modulus
        return sum(1 for d in diag if gcd(d, m) == 1) == A.ncols
    return len(diag) == A.ncols


@dataclass(frozen=True)
class _CocycleLattice:
    """Integer basis ``B`` of the lattice of cycles, with coordinates through ``V_inv`` and divisors."""

    B: ExactMatrix          # n x l, integer
    V_inv_rows: ExactMatrix  # l x n, integer
    divisors: Tuple[int, ...]

    def coords(self, X: ExactMatrix) -> ExactMatrix:
        """Coordinates (l x g) of the columns of integer matrix X, which must lie in the lattice."""
        Y = self.V_inv_rows @ X
        rows = {}
        for i, r in Y.nonzero_rows():
            e = self.divisors[i]
            out = {}
            for j, v in r.items():
                q, rem = divmod(v, e)
                if rem:
                    raise ValueError("vector not in the cycle lattice")
                out[j] = q
            rows[i] = out
        return ExactMatrix(INTEGERS, Y.nrows, Y.ncols, rows)


def _cycle_lattice(d: ExactMatrix, ring: CoefficientRing) -> _CocycleLattice:
    n = d.ncols
    f = smith_decomposition(_lift(d), inverses=True)
    r = f.rank
    if ring.kind == "Zmod":
        m = ring.modulus
        idx = list(range(n))
        div = [m // gcd(f.diagonal[i], m) for i in range(r)] + [1] * (n - r)
    else:
        idx = list(range(r, n))
        div = [1] * (n - r)
    B = f.V.submatrix(range(n), idx)
    if any(e != 1 for e in div):
        B = B @ ExactMatrix(INTEGERS, len(idx), len(idx),
                            {t: {t: e} for t, e in enumerate(div)})
    return _CocycleLattice(B, f.V_inv.submatrix(idx, range(n)), tuple(div))


def _relation_matrix(lat: _CocycleLattice, d_prev: ExactMatrix, ring: CoefficientRing) -> ExactMatrix:
    """Coordinates of the boundary lattice (plus m Z^n over Z/m) in the cycle basis."""
    gens = lat.coords(_lift(d_prev))
    if ring.kind == "Zmod":
        m = ring.modulus
        l = len(lat.divisors)
        scale = ExactMatrix(INTEGERS, l, l, {t: {t: m // e} for t, e in enumerate(lat.divisors)})
        gens = hstack([gens, scale])
    return gens


def subquotient_invariants(d: ExactMatrix, d_prev: ExactMatrix, ring: CoefficientRing) -> Tuple[int, Tuple[int, ...]]:
    """``(free rank, torsion)`` of ``ker d / im d_prev`` over ``ring``.

    Over Z/m "free rank" counts Z/m summands and torsion lists the proper
    divisors of m.
    """
    n = d.ncols
    if ring.kind != "Zmod":
        r = len(smith_diagonal(_lift(d)))
        prev = smith_diagonal(_lift(d_prev))
        free = n - r - len(prev)
        tors = () if ring.kind == "Q" else tuple(x for x in prev if x > 1)
        return free, tors
    m = ring.modulus
    lat = _cycle_lattice(d, ring)
    l = len(lat.divisors)
    if l == 0:
        return 0, ()
    diag = smith_diagonal(_relation_matrix(lat, d_prev, ring))
    if len(diag) != l:
        raise AssertionError("relation lattice over Z/m must have full rank")
    free = sum(1 for x in diag if x == m)
    tors = tuple(x for x in diag if 1 < x < m)
    return free, tors


@dataclass(frozen=True)
class SubquotientBasis:
    """Generators of ``ker d / im d_prev`` with their orders, and a class map.

    ``orders[i] == 0`` marks an infinite-order (free) generator over Z or Q;
    over Z/m a free generator has order m.
    """

    ring: CoefficientRing
    generators: Tuple[Tuple[int, ...], ...]   # cycle representatives, dense
    orders: Tuple[int, ...]
    _lattice: _CocycleLattice
    _P: ExactMatrix
    _keep: Tuple[int, ...]

    def coordinates(self, z: Sequence) -> Tuple:
        """Coordinates of the class of cycle ``z`` against :attr:`generators`."""
        ring = self.ring
        scale = 1
        if ring.kind == "Q":
            for v in z:
                if isinstance(v, Fraction):
                    scale = lcm(scale, v.denominator)
        col = ExactMatrix(INTEGERS, len(z), 1, {i: {0: int(v * scale)} for i, v in enumerate(z) if v})
        c = self._P @ self._lattice.coords(col)
        out = []
        for t, i in enumerate(self._keep):
            v = c[i, 0]
            o = self.orders[t]
            if ring.kind == "Q":
                out.append(ring.reduce(Fraction(v, scale)))
            elif o:
                out.append(v % o)
            else:
                out.append(v)
        return tuple(out)


def subquotient_basis(d: ExactMatrix, d_prev: ExactMatrix, ring: CoefficientRing) -> SubquotientBasis:
    lat = _cycle_lattice(d, ring)
    l = len(lat.divisors)
    rel = _relation_matrix(lat, d_prev, ring) if l else ExactMatrix.zeros(INTEGERS, 0, 0)
    f = smith_decomposition(rel, inverses=True)
    diag = list(f.diagonal) + [0] * (l - f.rank)
    if ring.kind == "Q":
        keep = [i for i in range(l) if diag[i] == 0]
    else:
        keep = [i for i in range(l) if diag[i] != 1]
    gens_lat = lat.B @ f.U_inv if l else lat.B
    gens = []
    for i in keep:
        col = [gens_lat[a, i] for a in range(d.ncols)]
        gens.append(tuple(ring.reduce(v) for v in col))
    orders = tuple(diag[i] for i in keep)
    return SubquotientBasis(ring, tuple(gens), orders, lat, f.U, tuple(keep))
