import json

import pytest
from hypothesis import given, settings

from hypersheaf.spaces import (
    FinitePoset,
    GuardExceeded,
    InvalidPosetError,
    NotOpenError,
    OpenCover,
    OpenSet,
    SimplicialComplex,
    all_opens,
    catalog,
    complex_from_json,
    connected_components,
    cover_from_json,
    face_poset,
    load_space,
    make_poset,
    min_open,
    order_complex,
    poset_from_json,
    product,
    random_poset,
    rp2_triangulation,
)
from oracles import brute_force_downsets, chains, simplicial_cohomology
from strategies import posets


def floyd_warshall(elements, pairs):
    reach = {(a, b): a == b or (a, b) in pairs for a in elements for b in elements}
    for k in elements:
        for i in elements:
            for j in elements:
                if reach[(i, k)] and reach[(k, j)]:
                    reach[(i, j)] = True
    return {p for p, v in reach.items() if v}


# --- posets -------------------------------------------------------------------

def test_one_point():
    X = make_poset(["a"])
    assert len(X) == 1 and X.height == 0


def test_cycle_rejected_with_names():
    with pytest.raises(InvalidPosetError, match="cycle"):
        make_poset(["a", "b"], [("a", "b"), ("b", "a")])
    with pytest.raises(InvalidPosetError):
        make_poset(["a"], [("a", "z")])
    with pytest.raises(InvalidPosetError):
        make_poset(["a", "a"])


def test_pseudocircle_closure():
    pairs = {("c", "a"), ("c", "b"), ("d", "a"), ("d", "b")}
    X = make_poset("abcd", pairs)
    assert X.relation() == floyd_warshall("abcd", pairs)
    assert X.height == 1


@settings(max_examples=40)
@given(posets)
def test_closure_matches_floyd_warshall(X):
    assert X.relation() == floyd_warshall(X.elements, set(X.covering_pairs()))
    for a, b in X.covering_pairs():
        assert X.lt(a, b)


def test_random_poset_is_deterministic():
    a, b = catalog("random(seed=7, n=8, p=0.3)"), catalog("random(7,8,0.3)")
    assert a.relation() == b.relation() == random_poset(7, 8, 0.3).relation()


# --- opens ----------------------------------------------------------------------

def test_min_open_examples():
    assert min_open(catalog("point"), "a").members == {"a"}
    S = catalog("sierpinski")
    assert min_open(S, "b").members == {"a", "b"} and min_open(S, "a").members == {"a"}
    assert min_open(catalog("pseudocircle"), "a").members == set("acd")


def test_all_opens_examples():
    assert len(all_opens(catalog("discrete(2)"))) == 4
    assert [set(U.members) for U in all_opens(catalog("sierpinski"))] == [set(), {"a"}, {"a", "b"}]
    # the pseudocircle's down-sets: {}, c, d, cd, acd, bcd, abcd
    P = catalog("pseudocircle")
    assert len(all_opens(P)) == len(brute_force_downsets(P.elements, P.leq)) == 7


@settings(max_examples=40)
@given(posets)
def test_all_opens_matches_brute_force(X):
    got = [U.members for U in all_opens(X)]
    assert len(got) == len(set(got))
    assert set(got) == set(brute_force_downsets(X.elements, X.leq))


@settings(max_examples=30)
@given(posets)
def test_min_open_is_smallest(X):
    opens = all_opens(X)
    for x in X.elements:
        U = min_open(X, x)
        assert X.is_open(U.members) and x in U
        assert all(U <= V for V in opens if x in V)


@settings(max_examples=30)
@given(posets)
def test_unions_and_intersections_are_open(X):
    opens = all_opens(X)[:20]
    for U in opens:
        for V in opens:
            assert X.is_open((U | V).members) and X.is_open((U & V).members)


def test_open_set_invariant():
    S = catalog("sierpinski")
    with pytest.raises(NotOpenError):
        OpenSet(S, ["b"])
    with pytest.raises(KeyError):
        OpenSet(S, ["z"])


def test_guard(monkeypatch):
    X = catalog("discrete(5)")
    with pytest.raises(GuardExceeded):
        all_opens(X, limit=10)
    monkeypatch.setenv("HYPERSHEAF_GUARD", "8")
    with pytest.raises(GuardExceeded, match="HYPERSHEAF_GUARD"):
        all_opens(X)
    monkeypatch.setenv("HYPERSHEAF_GUARD", "100")
    assert len(all_opens(X)) == 32


def test_covers():
    P = catalog("pseudocircle")
    Ua, Ub = min_open(P, "a"), min_open(P, "b")
    cover = OpenCover(P.whole, [Ua, Ub])
    assert cover.intersection([0, 1]).members == {"c", "d"}
    with pytest.raises(ValueError):
        OpenCover(P.whole, [Ua])
    with pytest.raises(ValueError):
        OpenCover(Ua, [Ua, Ub])
    assert cover_from_json(P, [["a", "c", "d"], ["b", "c", "d"]]).pieces == (Ua, Ub)
    with pytest.raises(NotOpenError):
        cover_from_json(P, [["a"], ["b", "c", "d"]])


def test_connected_components():
    assert len(connected_components(catalog("pseudocircle").whole)) == 1
    assert len(connected_components(catalog("discrete(3)").whole)) == 3
    P = catalog("pseudocircle")
    # {a, b} is not open under the down-set convention; {c, d} is its open analogue
    assert len(connected_components(P.open_set("cd"))) == 2


# --- simplicial complexes -----------------------------------------------------------

def test_order_complex_examples():
    K = order_complex(catalog("chain(2)").whole)
    assert K.f_vector() == (2, 1)
    assert order_complex(catalog("discrete(4)").whole).f_vector() == (4,)
    C = order_complex(catalog("pseudocircle").whole)
    assert C.f_vector() == (4, 4)


@settings(max_examples=30)
@given(posets)
def test_order_complex_simplices_are_chains(X):
    K = order_complex(X.whole)
    got = {frozenset(s) for s in K.all_simplices()}
    assert got == {frozenset(c) for c in chains(X.elements, X.lt)}


@settings(max_examples=30)
@given(posets)
def test_min_open_order_complex_is_a_cone(X):
    for x in X.elements:
        K = order_complex(min_open(X, x))
        assert all(x in f for f in K.facets())


def test_face_poset_examples():
    edge = face_poset(SimplicialComplex.from_facets("ab", ["ab"]))
    assert len(edge) == 3 and edge.lt("a", "a,b") and edge.lt("b", "a,b")
    tri = face_poset(SimplicialComplex.from_facets("abc", ["ab", "bc", "ac"]))
    assert len(tri) == 6 and tri.height == 1
    K = rp2_triangulation()
    assert K.f_vector() == (6, 15, 10)
    P = face_poset(K)
    assert len(P) == 31 and P.height == 2


def test_barycentric_subdivision_of_hollow_triangle():
    tri = SimplicialComplex.from_facets("abc", ["ab", "bc", "ac"])
    sd = order_complex(face_poset(tri).whole)
    assert len(sd.vertices) == 6
    # each edge splits in two
    assert sd.f_vector() == (6, 6)


def test_rp2_triangulation_cohomology_directly():
    assert simplicial_cohomology([list(f) for f in rp2_triangulation().facets()]) == {0: (1, ()), 2: (0, (2,))}


def test_product():
    P = catalog("pseudocircle")
    pt = catalog("point")
    Pp = product(P, pt)
    assert len(Pp) == len(P) and Pp.height == P.height
    grid = product(catalog("chain(2)"), catalog("chain(2)"))
    assert len(grid) == 4 and grid.height == 2
    T = product(P, P)
    assert len(T) == 16 and T.height == 2
    assert len(catalog("pseudo_torus")) == 16
    Q = catalog("sierpinski")
    left, right = product(product(P, Q), pt), product(P, product(Q, pt))
    assert len(left) == len(right) and len(left.relation()) == len(right.relation())


def test_catalog_facts():
    assert len(catalog("point")) == 1
    with pytest.raises(KeyError):
        catalog("klein_bottle")
    assert len(catalog("torus_face_poset")) == 7 + 21 + 14


# --- JSON -------------------------------------------------------------------------------

def test_space_json_roundtrip(tmp_path):
    P = catalog("pseudocircle")
    Q = poset_from_json(P.to_json())
    assert Q.relation() == P.relation()
    f = tmp_path / "space.json"
    f.write_text(json.dumps(P.to_json()))
    assert load_space(str(f)).relation() == P.relation()
    with pytest.raises(ValueError):
        poset_from_json({"elements": [1, 2]})
    with pytest.raises(ValueError):
        poset_from_json({"elements": ["a"], "relation": [["a"]]})


def test_complex_json_loads_as_face_poset(tmp_path):
    K = rp2_triangulation()
    assert complex_from_json(K.to_json()).f_vector() == K.f_vector()
    f = tmp_path / "rp2.json"
    f.write_text(json.dumps(K.to_json()))
    assert len(load_space(str(f))) == 31
