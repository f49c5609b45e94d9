import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hypersheaf.algebra import INTEGERS, RATIONALS, CoefficientRing, integers_mod
from hypersheaf.multiplicative import Cochain, cohomology_ring, commutativity_primitive, cup, cup1
from hypersheaf.spaces import SimplicialComplex, catalog, face_poset, order_complex, torus_triangulation
from oracles import dense_rank, nullspace
from strategies import random_cochain_values, random_simplicial_complex

RINGS = ["Z", "Q", "Zmod:2", "Zmod:4", "Zmod:5"]


def naive_cup(K, a, b):
    """Direct front-face / back-face evaluation, keyed by simplex."""
    p, q = a.degree, b.degree
    return {s: a(s[:p + 1]) * b(s[p:]) for s in K.simplices(p + q)}


def as_dict(c):
    return {s: v for s, v in zip(c.complex.simplices(c.degree), c.values)}


def random_pair(seed, sel):
    rng = random.Random(seed)
    R = CoefficientRing.parse(sel)
    K = random_simplicial_complex(rng)
    d = K.dimension
    p, q = rng.randint(0, d), rng.randint(0, d)
    a = Cochain(K, p, random_cochain_values(rng, K, p), R)
    b = Cochain(K, q, random_cochain_values(rng, K, q), R)
    return K, a, b, rng


def is_coboundary(K, c, p=None):
    """Whether cochain ``c`` lies in the image of the previous coboundary (over Q or F_p)."""
    k = c.degree
    vals = [int(v) if p is not None else Fraction(v) for v in c.values]
    if k == 0:
        return not any(vals)
    rows = K.coboundary(k - 1, INTEGERS).to_dense() if K.simplices(k) else []
    aug = [list(r) + [v] for r, v in zip(rows, vals)]
    return dense_rank(aug, p) == dense_rank(rows, p)


# --- cup ---------------------------------------------------------------------------

def test_degree_zero_cup_is_pointwise():
    K = SimplicialComplex("abc", ["ab", "bc"])
    a = Cochain.from_mapping(K, 0, {("a",): 2, ("b",): 3})
    b = Cochain.from_mapping(K, 0, {("a",): 5, ("c",): 7})
    assert cup(K, a, b).values == (10, 0, 0)


def test_cup_matches_naive_formula_on_an_edge():
    K = SimplicialComplex("ab", ["ab"])
    a = Cochain.from_mapping(K, 0, {("a",): 1})
    e = Cochain.from_mapping(K, 1, {("a", "b"): 1})
    assert cup(K, a, e)(("a", "b")) == 1 and cup(K, e, a)(("a", "b")) == 0


@settings(max_examples=60)
@given(st.integers(0, 10 ** 6), st.sampled_from(RINGS))
def test_unit_law(seed, sel):
    K, a, b, _ = random_pair(seed, sel)
    one = Cochain.unit(K, a.ring)
    assert cup(K, one, a) == a == cup(K, a, one)
    assert one.is_cocycle()


@settings(max_examples=60)
@given(st.integers(0, 10 ** 6), st.sampled_from(RINGS))
def test_cup_against_naive(seed, sel):
    K, a, b, _ = random_pair(seed, sel)
    want = {s: a.ring.reduce(v) for s, v in naive_cup(K, a, b).items()}
    assert as_dict(cup(K, a, b)) == want


@settings(max_examples=80)
@given(st.integers(0, 10 ** 6), st.sampled_from(RINGS))
def test_leibniz(seed, sel):
    K, a, b, _ = random_pair(seed, sel)
    lhs = cup(K, a, b).coboundary()
    rhs = cup(K, a.coboundary(), b) + cup(K, a, b.coboundary()).scale((-1) ** a.degree)
    assert lhs == rhs


@settings(max_examples=80)
@given(st.integers(0, 10 ** 6), st.sampled_from(RINGS))
def test_associativity(seed, sel):
    K, a, b, rng = random_pair(seed, sel)
    r = rng.randint(0, K.dimension)
    c = Cochain(K, r, random_cochain_values(rng, K, r), a.ring)
    assert cup(K, cup(K, a, b), c) == cup(K, a, cup(K, b, c))


def test_cup_above_dimension_is_zero():
    K = catalog("pseudocircle")
    C = order_complex(K.whole)
    e = Cochain.from_function(C, 1, lambda s: 1)
    sq = cup(C, e, e)
    assert sq.degree == 2 and sq.values == ()


def test_malformed_cochains_rejected():
    K = SimplicialComplex("ab", ["ab"])
    with pytest.raises(ValueError):
        Cochain(K, 1, [1, 2])
    with pytest.raises(ValueError):
        Cochain(K, -1, [])
    with pytest.raises(ValueError):
        Cochain.from_mapping(K, 1, {("a",): 1})
    with pytest.raises(TypeError):
        cup(K, Cochain.unit(K), [1, 1])
    L = SimplicialComplex("abc", ["abc"])
    with pytest.raises(ValueError):
        cup(K, Cochain.unit(K), Cochain.unit(L))
    with pytest.raises(ValueError):
        cup(K, Cochain.unit(K), Cochain.unit(K, RATIONALS))


# --- cup-1 -------------------------------------------------------------------------------

def test_cup1_of_degree_zero_inputs():
    K = SimplicialComplex("ab", ["ab"])
    with pytest.raises(ValueError):
        cup1(K, Cochain.unit(K), Cochain.unit(K))
    e = Cochain.from_mapping(K, 1, {("a", "b"): 3})
    assert cup1(K, Cochain.unit(K), e).is_zero() and cup1(K, e, Cochain.unit(K)).degree == 0


def cup1_identity_rhs(K, a, b):
    p, q = a.degree, b.degree
    return (cup(K, a, b).scale((-1) ** (p + q - 1))
            + cup(K, b, a).scale((-1) ** (p * q + p + q))
            + cup1(K, a.coboundary(), b)
            + cup1(K, a, b.coboundary()).scale((-1) ** p))


@settings(max_examples=80)
@given(st.integers(0, 10 ** 6))
def test_cup1_coboundary_identity_over_z(seed):
    K, a, b, _ = random_pair(seed, "Z")
    if a.degree + b.degree == 0:
        return
    assert cup1(K, a, b).coboundary() == cup1_identity_rhs(K, a, b)


@pytest.mark.parametrize("seed", range(20))
def test_cup1_identity_mod_2_on_the_pseudocircle(seed):
    rng = random.Random(seed)
    R = integers_mod(2)
    K = order_complex(catalog("pseudocircle").whole)
    p, q = rng.choice([(0, 1), (1, 0), (1, 1), (0, 0)])
    a = Cochain(K, p, [rng.randint(0, 1) for _ in K.simplices(p)], R)
    b = Cochain(K, q, [rng.randint(0, 1) for _ in K.simplices(q)], R)
    if p + q == 0:
        return
    lhs = cup1(K, a, b).coboundary()
    # every sign is +1 mod 2; evaluate both sides simplex by simplex
    rhs = cup(K, a, b) + cup(K, b, a) + cup1(K, a.coboundary(), b) + cup1(K, a, b.coboundary())
    for s in K.simplices(p + q):
        assert lhs(s) == rhs(s)


def clear_denominators(vec):
    den = math.lcm(*(Fraction(v).denominator for v in vec)) if vec else 1
    return [int(v * den) for v in vec]


def random_cocycle(rng, K, k, ring, p=None):
    rows = K.coboundary(k, INTEGERS).to_dense() if K.simplices(k + 1) else []
    basis = nullspace(rows, len(K.simplices(k)), p) if rows else \
        [[int(i == j) for i in range(len(K.simplices(k)))] for j in range(len(K.simplices(k)))]
    vec = [0] * len(K.simplices(k))
    for v in basis:
        c = rng.randint(-2, 2)
        vec = [x + c * y for x, y in zip(vec, v)]
    if p is None:
        vec = clear_denominators(vec)
    return Cochain(K, k, vec, ring)


@pytest.mark.parametrize("name,sel,p", [
    ("pseudo_torus", "Z", None), ("pseudo_torus", "Zmod:2", 2), ("rp2_face_poset", "Zmod:2", 2),
    ("rp2_face_poset", "Z", None),
])
def test_graded_commutativity_via_primitive(name, sel, p):
    R = CoefficientRing.parse(sel)
    K = order_complex(catalog(name).whole)
    rng = random.Random(5)
    for _ in range(3):
        a, b = random_cocycle(rng, K, 1, R, p), random_cocycle(rng, K, 1, R, p)
        assert a.is_cocycle() and b.is_cocycle()
        h = commutativity_primitive(K, a, b)
        assert h.coboundary() == cup(K, a, b) + cup(K, b, a)   # (-1)^{pq} = -1 for p = q = 1
    x = random_cocycle(rng, K, 0, R, p)
    y = random_cocycle(rng, K, 2, R, p)
    h = commutativity_primitive(K, x, y)
    assert h.coboundary() == cup(K, x, y) - cup(K, y, x)


# --- cohomology rings --------------------------------------------------------------------------

def test_pseudocircle_ring():
    H = cohomology_ring(catalog("pseudocircle"))
    assert H.orders == {0: (0,), 1: (0,)}
    assert H.product(1, (1,), 1, (1,)) == ()
    assert H.pairing_rank(1, 1) == 0
    assert H.product(0, H.unit(), 1, (1,)) == (1,)


def test_discrete_two_points_componentwise():
    H = cohomology_ring(catalog("discrete(2)"))
    assert H.dimension(0) == 2 and H.degrees == [0]
    reps = H.representatives[0]
    for i in range(2):
        for j in range(2):
            prod = cup(H.complex, reps[i], reps[j])
            assert prod.values == tuple(u * v for u, v in zip(reps[i].values, reps[j].values))
            assert H.structure[(0, i), (0, j)] == H.classes[0].coordinates(prod.values)


def fundamental_cycle(K):
    """Primitive integral generator of the rational 2-cycles of a closed orientable surface."""
    boundary = [list(col) for col in zip(*K.coboundary(1, INTEGERS).to_dense())]
    (z,) = nullspace(boundary, len(K.simplices(2)))
    z = clear_denominators(z)
    g = math.gcd(*z)
    return [v // g for v in z]


@pytest.mark.parametrize("model", ["pseudo_torus", "torus_face_poset", "torus7"])
def test_torus_generators_cup_to_a_generator(model):
    X = torus_triangulation() if model == "torus7" else catalog(model)
    H = cohomology_ring(X, INTEGERS)
    K = H.complex
    assert H.orders[1] == (0, 0) and H.orders[2] == (0,)
    x, y = H.representatives[1]
    z = fundamental_cycle(K)
    ev = lambda c: sum(u * v for u, v in zip(c.values, z))
    assert abs(ev(cup(K, x, y))) == 1
    assert ev(cup(K, x, x)) == 0 and ev(cup(K, y, y)) == 0
    assert abs(H.structure[(1, 0), (1, 1)][0]) == 1


@pytest.mark.parametrize("model", ["pseudo_torus", "torus_face_poset", "torus7"])
def test_torus_exterior_algebra_over_q(model):
    X = torus_triangulation() if model == "torus7" else catalog(model)
    H = cohomology_ring(X, RATIONALS)
    K = H.complex
    assert [H.dimension(k) for k in range(3)] == [1, 2, 1]
    assert H.pairing_rank(1, 1) == 1
    x, y = H.representatives[1]
    assert not is_coboundary(K, cup(K, x, y))
    assert is_coboundary(K, cup(K, x, x)) and is_coboundary(K, cup(K, y, y))
    assert is_coboundary(K, cup(K, x, y) + cup(K, y, x))
    e = [(1, 0), (0, 1)]
    xy = H.product(1, e[0], 1, e[1])
    assert xy != (0,) and xy == tuple(-v for v in H.product(1, e[1], 1, e[0]))
    assert H.product(1, e[0], 1, e[0]) == (0,)


def test_rp2_square_is_nonzero_mod_2():
    H = cohomology_ring(catalog("rp2_face_poset"), integers_mod(2))
    assert [H.dimension(k) for k in range(3)] == [1, 1, 1]
    K = H.complex
    (x,) = H.representatives[1]
    assert not is_coboundary(K, cup(K, x, x), 2)
    assert H.product(1, (1,), 1, (1,)) == (1,)
    assert H.pairing_rank(1, 1) == 1


def test_rp2_over_z_has_torsion_square():
    H = cohomology_ring(catalog("rp2_face_poset"), INTEGERS)
    assert H.orders.get(1, ()) == () and H.orders[2] == (2,)
    assert H.pairing_rank(0, 2) == 0


@pytest.mark.parametrize("name", ["point", "sierpinski", "pseudocircle", "pseudo_torus"])
def test_unit_acts_as_identity(name):
    H = cohomology_ring(catalog(name), RATIONALS)
    u = H.unit()
    for k in H.degrees:
        for i in range(H.dimension(k)):
            e = tuple(int(t == i) for t in range(H.dimension(k)))
            assert H.product(0, u, k, e) == e == H.product(k, e, 0, u)


def test_structure_constants_respect_grading():
    H = cohomology_ring(catalog("pseudo_torus"), RATIONALS)
    for ((p, i), (q, j)), vec in H.structure.items():
        assert len(vec) == H.dimension(p + q)


def test_ring_json():
    H = cohomology_ring(catalog("pseudocircle"))
    out = H.to_json()
    assert out["schema"] == 1 and out["ring"] == "Z"
    assert out["basis"] == {"0": [0], "1": [0]}
    assert {"left": [0, 0], "right": [1, 0], "product": [1]} in out["structure_constants"]
