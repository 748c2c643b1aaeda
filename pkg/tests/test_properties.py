import numpy as np
from hypothesis import given, settings, strategies as st

from twoclosure import (
    BinaryRelation,
    PermGroup,
    Permutation,
    algebraic_isomorphism,
    intersection_numbers,
    point_extension,
    scheme_of_group,
    verify_coherent,
    wl_closure,
)
from twoclosure.closure import generating_sets, imbed
from twoclosure.oracle import aut_oracle
from twoclosure.zoo import corpus

import brute

CORPUS = corpus()
SMALL = [name for name, G in CORPUS.items() if G.degree <= 13 and not G.is_2transitive()]


@st.composite
def relations(draw, max_n=9, max_rel=3):
    n = draw(st.integers(2, max_n))
    pair = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
    rels = draw(st.lists(st.lists(pair, min_size=1, max_size=2 * n), min_size=1, max_size=max_rel))
    return n, [BinaryRelation(n, r) for r in rels]


@st.composite
def groups(draw, max_n=6):
    n = draw(st.integers(2, max_n))
    gens = draw(st.lists(st.permutations(list(range(n))), min_size=1, max_size=3))
    return PermGroup([Permutation(g) for g in gens], n)


@settings(max_examples=60, deadline=None)
@given(relations())
def test_wl_is_coherent_and_idempotent(data):
    n, P = data
    X = wl_closure(P)
    assert verify_coherent(X).ok
    assert wl_closure(X.classes()).same_partition(X)
    assert algebraic_isomorphism(P, P, list(range(len(P)))).is_identity()


@settings(max_examples=40, deadline=None)
@given(relations(max_n=8), st.randoms(use_true_random=False))
def test_wl_commutes_with_relabeling(data, rnd):
    n, P = data
    z = list(range(n))
    rnd.shuffle(z)
    Pz = [BinaryRelation(n, [(z[a], z[b]) for a, b in R.pairs()]) for R in P]
    X, Y = wl_closure(P), wl_closure(Pz)
    zi = np.array(z)
    assert (Y.colors[np.ix_(zi, zi)] == X.colors).all()
    phi = algebraic_isomorphism(P, Pz)
    assert phi is not None and phi.is_algebraic_isomorphism(X, Y)


@settings(max_examples=40, deadline=None)
@given(groups())
def test_scheme_galois(G):
    X = scheme_of_group(G)
    assert verify_coherent(X).ok
    A = aut_oracle(X)
    assert G.is_subgroup_of(A)
    assert {p.images for p in A.elements()} == brute.brute_aut(X.colors.tolist())


@settings(max_examples=30, deadline=None)
@given(groups(max_n=7), st.data())
def test_point_extension_refines(G, data):
    X = scheme_of_group(G)
    pts = data.draw(st.lists(st.integers(0, G.degree - 1), max_size=2, unique=True))
    E = point_extension(X, pts)
    assert E.is_refinement_of(X) and verify_coherent(E).ok
    fibers = [set(f) for f in E.fibers()]
    for a in pts:
        assert {a} in fibers


@settings(max_examples=30, deadline=None)
@given(groups(max_n=7))
def test_tensor_by_direct_count(G):
    X = scheme_of_group(G)
    assert brute.tensor_brute(X.colors.tolist()) == intersection_numbers(X)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SMALL), st.randoms(use_true_random=False))
def test_imbed_recovers_conjugator(name, rnd):
    G = CORPUS[name]
    n = G.degree
    T = generating_sets(G)[0]
    z = list(range(n))
    rnd.shuffle(z)
    z = Permutation(z)
    T2 = [t.conjugate(z) for t in T]
    H = G.conjugate(z)
    w = rnd.randrange(n)
    x = imbed(G, T, H, T2, omega=w, omega2=z(w))
    assert x == z
