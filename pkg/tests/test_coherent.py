import itertools
import random

import numpy as np
import pytest

from twoclosure import (
    BinaryRelation,
    CoherentConfiguration,
    ColorBijection,
    PermGroup,
    Permutation,
    algebraic_isomorphism,
    dihedral,
    intersection_numbers,
    is_complete,
    is_semiregular,
    is_three_halves_homogeneous,
    iso_from_regular_point,
    k_orbits,
    list_isomorphisms_bounded_base,
    point_extension,
    regular_points,
    scheme_of_group,
    verify_coherent,
    wl_closure,
)
from twoclosure.coherent import joint_wl_closure
from twoclosure.errors import (
    BaseNotFound,
    IncoherentInput,
    NotAlgebraicIsomorphism,
    OverBudget,
    PreconditionViolation,
)
from twoclosure.oracle import aut_oracle

import brute


def cyc(n, *cycles):
    return Permutation.from_cycles(n, cycles)


D5 = dihedral(5)
Z4 = PermGroup([cyc(4, (0, 1, 2, 3))])
Z2xZ2 = PermGroup([cyc(4, (0, 1), (2, 3)), cyc(4, (0, 2), (1, 3))])


def cycle_relation(n, step=1):
    return BinaryRelation(n, [(i, (i + s) % n) for i in range(n) for s in (step, -step)])


C5 = cycle_relation(5)
PENTAGON = scheme_of_group(D5)


def elements(G):
    return brute.closure([g.images for g in G.generators], G.degree)


# ---- relations and configurations


def test_binary_relation_basics():
    R = BinaryRelation(3, [(0, 1), (0, 1), (1, 2)])
    assert R.pairs() == [(0, 1), (1, 2)]
    assert R.transpose().pairs() == [(1, 0), (2, 1)]
    with pytest.raises(ValueError):
        BinaryRelation(3, [(0, 3)])
    g = cyc(3, (0, 1, 2))
    assert BinaryRelation.from_permutation(g).pairs() == [(0, 1), (1, 2), (2, 0)]


def test_configuration_rejects_gaps():
    with pytest.raises(ValueError):
        CoherentConfiguration(np.array([[0, 2], [2, 0]]))


# ---- k-orbits


def test_k_orbits_examples():
    assert k_orbits(PermGroup([cyc(3, (0, 1, 2))]), 1).count == 1
    assert k_orbits(D5, 2).count == 3
    S3 = PermGroup.symmetric(3)
    orb = k_orbits(S3, 3)
    assert orb.count == 5
    assert orb.representatives == [(0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1), (0, 1, 2)]


def test_k_orbits_budget():
    with pytest.raises(OverBudget):
        k_orbits(D5, 3, budget=100)


def test_k_orbits_against_brute(corpus):
    for name in ["D5", "D7", "Frob9", "AGL(1,8)", "AS0(9)"]:
        G = corpus[name]
        els = elements(G)
        for k in (2, 3):
            orb = k_orbits(G, k)
            assert orb.count == brute.k_orbit_count(els, G.degree, k)
            # labels are constant on orbits
            for t in itertools.islice(itertools.product(range(G.degree), repeat=k), 0, None, 7):
                g = random.Random(hash(t)).choice(sorted(els))
                assert orb.label(t) == orb.label(tuple(g[x] for x in t))


# ---- scheme of a group


def test_scheme_examples():
    for n in (2, 3, 5):
        assert scheme_of_group(PermGroup.symmetric(n)).rank == 2
    X = scheme_of_group(D5)
    assert X.rank == 3
    assert sorted(X.sizes.tolist()) == [5, 10, 10]
    Y = scheme_of_group(Z4)
    assert Y.rank == 4
    for a in range(4):
        for b in range(4):
            assert Y.colors[a, b] == Y.colors[0, (b - a) % 4]


def test_scheme_equals_two_orbits(corpus):
    for name, G in corpus.items():
        if G.order() > 3000:
            continue
        X = scheme_of_group(G)
        assert brute.same_partition(X.colors, brute.two_orbit_matrix(sorted(elements(G)), G.degree)), name


def test_scheme_of_intransitive_group():
    G = PermGroup([cyc(5, (0, 1)), cyc(5, (2, 3, 4))])
    X = scheme_of_group(G)
    assert verify_coherent(X).ok
    assert len(X.fibers()) == 2
    assert not is_three_halves_homogeneous(X)


# ---- coherence checks and intersection numbers


def test_verify_examples():
    assert verify_coherent(PENTAGON).ok
    M = np.array([[1 if (a - b) % 5 in (1, 4) else 0 for b in range(5)] for a in range(5)])
    chk = verify_coherent(CoherentConfiguration(M))
    assert not chk.ok and chk.axiom == "C1"
    from twoclosure import as0
    X = scheme_of_group(as0(3, 2))
    assert X.rank == 3 and verify_coherent(X).ok


def test_verify_c2_and_c3_witness():
    # directed 3-cycle colored the same as its reverse is fine; split it unevenly for C3
    M = np.array([[0, 1, 1], [1, 0, 2], [1, 2, 0]])
    chk = verify_coherent(CoherentConfiguration(M))
    assert not chk.ok
    assert chk.axiom in ("C2", "C3")
    M = np.array([[0, 1, 2], [2, 0, 1], [1, 1, 0]])
    chk = verify_coherent(CoherentConfiguration(M))
    assert not chk.ok and chk.axiom == "C2"


def test_verify_matches_brute_on_random_colorings():
    rng = random.Random(3)
    agree = 0
    for _ in range(200):
        n = rng.randint(2, 6)
        k = rng.randint(2, 4)
        M = [[rng.randrange(k) if a != b else 0 for b in range(n)] for a in range(n)]
        used = sorted({c for row in M for c in row})
        M = [[used.index(c) for c in row] for row in M]
        assert verify_coherent(CoherentConfiguration(np.array(M))).ok == brute.is_coherent_brute(M)
        agree += 1
    assert agree == 200


def test_intersection_number_examples():
    X = PENTAGON
    T = intersection_numbers(X)
    edge = X.colors[0, 1]
    assert T.get((edge, edge, edge), 0) == 0
    d = X.colors[0, 0]
    for s in range(X.rank):
        for t in range(X.rank):
            assert T.get((d, s, t), 0) == (1 if s == t else 0)
    K4 = scheme_of_group(PermGroup.symmetric(4))
    s = K4.colors[0, 1]
    assert intersection_numbers(K4)[(s, s, s)] == 2


def test_intersection_numbers_reject_incoherent():
    M = np.array([[1 if (a - b) % 5 in (1, 4) else 0 for b in range(5)] for a in range(5)])
    with pytest.raises(IncoherentInput):
        intersection_numbers(CoherentConfiguration(M))


def test_tensor_matches_direct_count(corpus):
    for name, G in corpus.items():
        if G.degree > 40:
            continue
        X = scheme_of_group(G)
        want = brute.tensor_brute(X.colors.tolist())
        assert want == intersection_numbers(X), name


# ---- WL closure


def test_wl_examples():
    X = wl_closure([C5])
    assert X.rank == 3 and X.same_partition(PENTAGON)
    T = wl_closure([BinaryRelation.diagonal(6)])
    assert T.rank == 2
    g = cyc(5, (0, 1, 2, 3, 4))
    Z = wl_closure([BinaryRelation.from_permutation(g)])
    assert Z.rank == 5 and is_semiregular(Z)


def test_wl_classes_cover_inputs():
    rng = random.Random(11)
    for _ in range(20):
        n = rng.randint(3, 10)
        P = [BinaryRelation(n, [(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(1, 2 * n))])
             for _ in range(rng.randint(1, 3))]
        X = wl_closure(P)
        assert verify_coherent(X).ok
        for R in P:
            M = R.matrix
            for c in np.unique(X.colors[M]):
                assert M[X.colors == c].all()


def test_wl_fixes_schemes(corpus):
    for name, G in corpus.items():
        X = scheme_of_group(G)
        assert wl_closure(X.classes()).same_partition(X), name


def test_wl_matches_forced_split_closure():
    rng = random.Random(5)
    for _ in range(25):
        n = rng.randint(3, 9)
        P = [{(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(1, n))} for _ in range(2)]
        X = wl_closure([BinaryRelation(n, R) for R in P])
        assert brute.same_partition(X.colors, brute.algebra_closure(P, n))


def _atoms(W, P, n):
    """Atom of each class of W: the membership vector of its pairs."""
    atoms = []
    for c in range(int(W.max()) + 1):
        a, b = map(int, np.argwhere(W == c)[0])
        atoms.append((a == b,) + tuple((a, b) in R for R in P) + tuple((b, a) in R for R in P))
    return atoms


def test_wl_minimal_against_exhaustive_coarsenings():
    rng = random.Random(8)
    tried = 0
    while tried < 12:
        n = rng.randint(3, 8)
        P = [{(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(1, n))}]
        X = wl_closure([BinaryRelation(n, R) for R in P])
        atoms = _atoms(X.colors, P, n)
        groups = {}
        for a in atoms:
            groups[a] = groups.get(a, 0) + 1
        if np.prod([brute.bell(k) for k in groups.values()]) > 5000:
            continue
        tried += 1
        assert brute.coherent_coarsenings(X.colors, atoms) == []


def test_wl_pentagon_minimal_n12():
    P = [{(i, (i + 1) % 12) for i in range(12)}]
    X = wl_closure([BinaryRelation(12, R) for R in P])
    atoms = _atoms(X.colors, P, 12)
    assert brute.coherent_coarsenings(X.colors, atoms) == []
    assert X.rank == 12


def test_wl_monotone():
    rng = random.Random(2)
    for _ in range(15):
        n = rng.randint(3, 9)
        R1 = BinaryRelation(n, [(rng.randrange(n), rng.randrange(n)) for _ in range(n)])
        R2 = BinaryRelation(n, [(rng.randrange(n), rng.randrange(n)) for _ in range(n)])
        X, Y = wl_closure([R1]), wl_closure([R1, R2])
        assert Y.rank >= X.rank and Y.is_refinement_of(X)


def test_wl_label_invariant():
    rng = random.Random(4)
    for _ in range(15):
        n = rng.randint(3, 9)
        R = BinaryRelation(n, [(rng.randrange(n), rng.randrange(n)) for _ in range(2 * n)])
        z = list(range(n))
        rng.shuffle(z)
        Rz = BinaryRelation(n, [(z[a], z[b]) for a, b in R.pairs()])
        X, Y = wl_closure([R]), wl_closure([Rz])
        zi = np.array(z)
        assert (Y.colors[np.ix_(zi, zi)] == X.colors).all()


# ---- algebraic isomorphisms


def test_algebraic_isomorphism_examples():
    z = [3, 0, 4, 1, 2]
    C5z = BinaryRelation(5, [(z[a], z[b]) for a, b in C5.pairs()])
    phi = algebraic_isomorphism([C5], [C5z], [0])
    assert phi is not None and phi.source_rank == 3
    P5 = BinaryRelation(5, [(i, i + 1) for i in range(4)] + [(i + 1, i) for i in range(4)])
    assert algebraic_isomorphism([C5], [P5], [0]) is None
    assert algebraic_isomorphism([C5], [C5], [0]).is_identity()


def test_accepted_bijections_preserve_full_tensor():
    rng = random.Random(6)
    for _ in range(20):
        n = rng.randint(3, 12)
        R = BinaryRelation(n, [(rng.randrange(n), rng.randrange(n)) for _ in range(2 * n)])
        z = list(range(n))
        rng.shuffle(z)
        Rz = BinaryRelation(n, [(z[a], z[b]) for a, b in R.pairs()])
        X, Y, phi = joint_wl_closure([R], [Rz], [0])
        TX, TY = brute.tensor_brute(X.colors.tolist()), brute.tensor_brute(Y.colors.tolist())
        m = phi.as_array()
        assert {(m[r], m[s], m[t]): c for (r, s, t), c in TX.items()} == TY


def test_color_bijection_checks():
    X = PENTAGON
    Z5 = scheme_of_group(PermGroup([cyc(5, (0, 1, 2, 3, 4))]))
    assert ColorBijection.identity(3).is_algebraic_isomorphism(X, X)
    e, d = X.colors[0, 1], X.colors[0, 2]
    swap = ColorBijection.from_pairs([(X.colors[0, 0], X.colors[0, 0]), (e, d), (d, e)])
    assert swap.is_algebraic_isomorphism(X, X)
    assert not ColorBijection.identity(3).preserves_basics(X, Z5)


# ---- point extensions and regular points


def test_point_extension_examples():
    K4 = scheme_of_group(PermGroup.symmetric(4))
    E = point_extension(K4, [0])
    assert E.rank == 5
    assert sorted(sorted(f) for f in E.fibers()) == [[0], [1, 2, 3]]
    full = CoherentConfiguration(np.arange(9).reshape(3, 3))
    assert point_extension(full, [1]).same_partition(full)
    assert is_complete(point_extension(PENTAGON, [0, 1]))


def test_point_extension_refines(corpus):
    for name in ["D7", "Frob9", "AS0(9)", "AGL(1,7)"]:
        X = scheme_of_group(corpus[name])
        E = point_extension(X, [0, 2])
        assert E.is_refinement_of(X)
        fibers = [set(f) for f in E.fibers()]
        assert {0} in fibers and {2} in fibers


def test_regular_point_examples():
    assert is_semiregular(scheme_of_group(Z4))
    assert regular_points(PENTAGON) == frozenset()
    full = CoherentConfiguration(np.arange(9).reshape(3, 3))
    assert is_complete(full)
    assert not is_complete(PENTAGON)


def test_three_halves_homogeneous_examples():
    assert is_three_halves_homogeneous(PENTAGON)
    assert is_three_halves_homogeneous(scheme_of_group(PermGroup.symmetric(4)))


def test_iso_from_regular_point_examples():
    X = scheme_of_group(Z4)
    phi = ColorBijection.identity(X.rank)
    assert iso_from_regular_point(X, X, phi, 0, 0) == Permutation.identity(4)
    f = iso_from_regular_point(X, X, phi, 0, 1)
    assert f == cyc(4, (0, 1, 2, 3))
    Y = scheme_of_group(Z2xZ2)
    for perm in itertools.permutations(range(1, 4)):
        psi = ColorBijection([0] + list(perm))
        assert iso_from_regular_point(X, Y, psi, 0, 0) is None
    with pytest.raises(PreconditionViolation):
        iso_from_regular_point(PENTAGON, PENTAGON, ColorBijection.identity(3), 0, 0)


# ---- bounded base listing


def test_bounded_base_examples(corpus):
    X = scheme_of_group(corpus["Frob9"])
    S = list_isomorphisms_bounded_base(X, X, ColorBijection.identity(X.rank))
    assert len(S) == 18
    assert {p.images for p in S} == elements(corpus["Frob9"])
    S = list_isomorphisms_bounded_base(PENTAGON, PENTAGON, ColorBijection.identity(3), b_max=2)
    assert {p.images for p in S} == elements(D5)
    d, e = PENTAGON.colors[0, 0], PENTAGON.colors[0, 1]
    with pytest.raises(NotAlgebraicIsomorphism):
        list_isomorphisms_bounded_base(PENTAGON, PENTAGON, ColorBijection.from_pairs([(d, e), (e, d), (3 - d - e, 3 - d - e)]))


def test_bounded_base_not_found():
    with pytest.raises(BaseNotFound):
        list_isomorphisms_bounded_base(PENTAGON, PENTAGON, ColorBijection.identity(3), b_max=0)


def test_bounded_base_equals_brute_small(corpus):
    for name, G in corpus.items():
        if G.degree > 9:
            continue
        X = scheme_of_group(G)
        try:
            S = list_isomorphisms_bounded_base(X, X, ColorBijection.identity(X.rank))
        except BaseNotFound:
            continue
        want = brute.brute_iso(X.colors.tolist(), X.colors.tolist(), list(range(X.rank)))
        assert {p.images for p in S} == want, name


def test_bounded_base_equals_oracle(corpus):
    checked = 0
    for name, G in corpus.items():
        if G.degree > 21:
            continue
        X = scheme_of_group(G)
        try:
            S = list_isomorphisms_bounded_base(X, X, ColorBijection.identity(X.rank))
        except BaseNotFound:
            continue
        A = aut_oracle(X)
        assert {p.images for p in S} == {p.images for p in A.elements()}, name
        checked += 1
    assert checked >= 10
