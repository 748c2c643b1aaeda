"""2-closure, k-closure and scheme isomorphism for 3/2-transitive groups.

Conventions: groups act on the right, ``t^x = x^-1 t x``, and an
isomorphism f from X to Y satisfies ``Y[f(a), f(b)] = psi(X[a, b])``.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .coherent import (
    ColorBijection,
    _initial_keys,
    _iso_from_regular,
    _refine_joint,
    _regular_mask,
    k_orbits,
    list_isomorphisms_bounded_base,
    scheme_of_group,
)
from .errors import (
    NoGeneratingPair,
    NotAlgebraicIsomorphism,
    PreconditionViolation,
    DegreeMismatch,
)
from .isoset import IsoSet
from .oracle import AUT_CAP, ISO_CAP, aut_oracle, iso_oracle
from .perm import DEFAULT_ELEMENT_CAP, Permutation, PermGroup, generated_order_at_least
from .zoo import agammal1, as0, prime_power

CLASSIFICATION_BOUND = 169
DEFAULT_THRESHOLD = CLASSIFICATION_BOUND
ELEMENT_CAP = int(os.environ.get("TWOCLOSURE_ELEMENT_CAP", DEFAULT_ELEMENT_CAP))
TUPLE_BUDGET = int(os.environ.get("TWOCLOSURE_TUPLE_BUDGET", 10**7))

_CHUNK = 1 << 22


def _perm(row):
    return Permutation._raw(tuple(int(v) for v in row))


def _arr(p):
    return np.asarray(p.images, dtype=np.int64)


def diagnose_three_halves(G):
    """None if G is 3/2-transitive, otherwise the reason it is not."""
    if not G.is_transitive():
        return f"not transitive: orbits {sorted(len(o) for o in G.orbits())}"
    subs = G.suborbits(0)
    sizes = sorted({len(s) for s in subs if 0 not in s})
    if not sizes:
        return "degree 1"
    if len(sizes) > 1:
        return f"suborbit sizes differ: {sizes}"
    if sizes[0] == 1:
        return "point stabilizer is trivial on the other points (regular action)"
    return None


def _require_three_halves(G):
    why = diagnose_three_halves(G)
    if why is not None:
        raise PreconditionViolation(f"group is not 3/2-transitive ({why})")


# -- brute force within a small group -----------------------------------------

def _preserving_rows(X, A, target=None, psi=None):
    """Rows h of A with target[h(a), h(b)] == psi(X[a, b]) for all a, b."""
    target = X if target is None else target
    want = X if psi is None else psi[X]
    n = X.shape[0]
    keep = (target[A[:, :1], A] == want[0][None, :]).all(axis=1)
    rows = np.nonzero(keep)[0]
    out = []
    step = max(1, _CHUNK // (n * n))
    for s in range(0, len(rows), step):
        chunk = A[rows[s:s + step]]
        ok = (target[chunk[:, :, None], chunk[:, None, :]] == want[None]).all(axis=(1, 2))
        out.extend(rows[s:s + step][ok].tolist())
    return out


def bfc(G, H, cap=None):
    """The elements of H preserving every 2-orbit of G, i.e. G^(2) meet H."""
    if G.degree != H.degree:
        raise DegreeMismatch("groups act on different degrees")
    X = scheme_of_group(G).colors
    A = H.as_array(ELEMENT_CAP if cap is None else cap)
    rows = _preserving_rows(X, A)
    return PermGroup.from_elements([tuple(A[i].tolist()) for i in rows], G.degree)


def bfi(X, Y, H, psi=None, cap=None):
    """Elements of H that are isomorphisms X -> Y (matching psi when given)."""
    if X.degree != Y.degree:
        raise DegreeMismatch("configurations have different degrees")
    n = X.degree
    A = H.as_array(ELEMENT_CAP if cap is None else cap)
    if X.rank != Y.rank or not (np.sort(X.sizes) == np.sort(Y.sizes)).all():
        return IsoSet.empty(n)
    C, D = X.colors, Y.colors
    if psi is not None:
        rows = _preserving_rows(C, A, D, psi.as_array())
        return IsoSet(n, [_perm(A[i]) for i in rows])
    found = []
    reps = X.representatives
    ra = np.array([a for a, _ in reps])
    rb = np.array([b for _, b in reps])
    step = max(1, _CHUNK // (n * n))
    for s in range(0, len(A), step):
        chunk = A[s:s + step]
        m = D[chunk[:, ra], chunk[:, rb]]  # induced color map per element
        img = D[chunk[:, :, None], chunk[:, None, :]]
        mapped = np.take_along_axis(m, C.reshape(1, -1).repeat(len(chunk), 0), axis=1)
        ok = (img.reshape(len(chunk), -1) == mapped).all(axis=1)
        ok &= np.array([len(set(row)) == X.rank for row in m.tolist()])
        found.extend(_perm(chunk[i]) for i in np.nonzero(ok)[0])
    return IsoSet(n, found)


# -- IMBED ----------------------------------------------------------------------

@dataclass(frozen=True)
class EmbeddingWitness:
    x: Permutation
    T: tuple
    T2: tuple
    omega: int
    omega2: int

    def __post_init__(self):
        for t, t2 in zip(self.T, self.T2):
            if t.conjugate(self.x) != t2:
                raise ValueError("witness does not conjugate T onto T'")
        if self.x(self.omega) != self.omega2:
            raise ValueError("witness does not map omega to omega'")


def _functional(t):
    n = t.degree
    M = np.zeros((n, n), dtype=bool)
    M[np.arange(n), np.asarray(t.images)] = True
    return M


def _imbed_core(T, T2, omega, omega2):
    n = T[0].degree
    P = [_functional(t) for t in T]
    P2 = [_functional(t) for t in T2]
    # Steps 1-2: WL closures of the functional relations, refined side by side
    out = _refine_joint([_initial_keys(n, relations=P), _initial_keys(n, relations=P2)], n)
    if out is None:
        return None
    X, Y = out
    # Step 3: the joint numbering is the algebraic isomorphism; check the fibers
    if X[omega, omega] != Y[omega2, omega2]:
        return None
    if not (_regular_mask(X)[omega] and _regular_mask(Y)[omega2]):
        return None
    # Step 4: the unique isomorphism taking omega to omega'
    ident = np.arange(int(X.max()) + 1, dtype=np.int64)
    return _iso_from_regular(X, Y, ident, omega, omega2)


def imbed(G, T, H, T2, psi=None, omega=0, omega2=0, *, check=True):
    """x with t^x = psi(t) for t in T and omega^x = omega', or None.

    psi is an index list (T[i] -> T2[psi[i]]); None means T[i] -> T2[i].
    """
    T = list(T)
    T2 = list(T2)
    if len(T) != len(T2) or not T:
        raise ValueError("T and T' must be nonempty and of equal size")
    if psi is not None:
        if sorted(psi) != list(range(len(T))):
            raise ValueError("psi must be a bijection of indices")
        T2 = [T2[j] for j in psi]
    if check:
        if not G.is_transitive():
            raise PreconditionViolation("G is not transitive")
        if any(t not in G for t in T) or PermGroup(T, G.degree).order() != G.order():
            raise PreconditionViolation("T does not generate G")
        if any(t not in H for t in T2):
            raise PreconditionViolation("T' is not contained in H")
    if any(t.cycle_type() != t2.cycle_type() for t, t2 in zip(T, T2)):
        return None
    return _imbed_core(T, T2, omega, omega2)


def _union_roots(gens, n):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x
    for g in gens:
        for x in range(n):
            u, v = find(x), find(g[x])
            if u != v:
                parent[max(u, v)] = min(u, v)
    return sorted({find(x) for x in range(n)})


def abelianization_rank(G):
    """Minimal number of generators of G/G', from |A/A^p| over primes p."""
    from sympy import factorint
    from sympy.combinatorics import Permutation as SPerm, PermutationGroup

    S = G._sympy()
    D = S.derived_subgroup()
    index = S.order() // D.order()
    rank = 0
    for p in factorint(index):
        gens = list(D.generators) + [g**p for g in S.generators]
        gens = gens or [SPerm(list(range(G.degree)))]
        sub = PermutationGroup(gens)
        k = S.order() // sub.order()
        r = 0
        while k > 1:
            k //= p
            r += 1
        rank = max(rank, r)
    return rank


def generating_pairs(G, first_only=False, cap=None):
    """Unordered pairs (a, b), a < b in element order, with <a, b> = G."""
    elems = G.elements(ELEMENT_CAP if cap is None else cap)
    order = len(elems)
    n = G.degree
    if order > 1 and abelianization_rank(G) > 2:
        raise NoGeneratingPair("G/G' needs more than two generators")
    orbits = _union_roots([g.images for g in G.generators], n)
    found = []
    for i, j in itertools.combinations(range(order), 2):
        a, b = elems[i], elems[j]
        if _union_roots((a.images, b.images), n) != orbits:
            continue
        if generated_order_at_least([a, b], n, order):
            found.append((a, b))
            if first_only:
                break
    if not found:
        raise NoGeneratingPair("no two elements generate the group")
    return found


def first_generating_triple(G, cap=None):
    """Least (a, b, c) in element order with <a, b> transitive and <a, b, c> = G."""
    elems = G.elements(ELEMENT_CAP if cap is None else cap)
    order = len(elems)
    n = G.degree
    for i, j in itertools.combinations(range(order), 2):
        a, b = elems[i], elems[j]
        if len(_union_roots((a.images, b.images), n)) != 1:
            continue
        for c in elems:
            if generated_order_at_least([a, b, c], n, order):
                return (a, b, c)
    raise NoGeneratingPair("no generating triple with a transitive leading pair")


def generating_sets(G, all_pairs=False, cap=None):
    """Generating pairs as TWOCLOSURE Step 3 wants them; a triple when G is not 2-generated."""
    try:
        return generating_pairs(G, first_only=not all_pairs, cap=cap)
    except NoGeneratingPair:
        return [first_generating_triple(G, cap=cap)]


def _power_rows(A, e):
    n = A.shape[1]
    result = np.broadcast_to(np.arange(n), A.shape).copy()
    base = A.copy()
    while e:
        if e & 1:
            result = np.take_along_axis(base, result, axis=1)
        e >>= 1
        if e:
            base = np.take_along_axis(base, base, axis=1)
    return result


def _divisors(m):
    return [d for d in range(1, m + 1) if m % d == 0]


def _same_cycle_type_mask(A, t):
    """Rows of A with the cycle type of t (fixed points of powers at divisors of |t|)."""
    o = t.order()
    n = A.shape[1]
    ident = np.arange(n)
    mask = (_power_rows(A, o) == ident).all(axis=1)
    ta = _arr(t)[None, :]
    for d in _divisors(o):
        fp = (_power_rows(A, d) == ident).sum(axis=1)
        mask &= fp == int((_power_rows(ta, d) == ident).sum())
    return mask


def _bfs_tree(T, omega):
    n = T[0].degree
    seen = {omega}
    edges = []
    frontier = [omega]
    while frontier:
        nxt = []
        for a in frontier:
            for i, t in enumerate(T):
                b = t(a)
                if b not in seen:
                    seen.add(b)
                    edges.append((a, i, b))
                    nxt.append(b)
        frontier = nxt
    if len(seen) != n:
        raise PreconditionViolation("<T> is not transitive")
    return edges


def _conjugacy_reps(rows, stab):
    """Representatives of the rows under conjugation by the rows of stab."""
    stab_inv = np.argsort(stab, axis=1)
    seen = set()
    reps = []
    for r in rows:
        key = r.tobytes()
        if key in seen:
            continue
        reps.append(r)
        # s^-1 r s as a table: a -> s[r[s^-1[a]]]
        conj = np.take_along_axis(stab, r[stab_inv], axis=1)
        seen.update(c.tobytes() for c in conj)
    return reps


def _propagate(t1, t2, edges, omega, omega2, c1, C2):
    """For each candidate row of C2 the forced map y with y t'_i = t_i y, or a rejection."""
    k, n = C2.shape
    rows = np.arange(k)
    Y = np.zeros((k, n), dtype=np.int64)
    Y[:, omega] = omega2
    for a, i, b in edges:
        Y[:, b] = c1[Y[:, a]] if i == 0 else C2[rows, Y[:, a]]
    ok = (Y[:, _arr(t1)] == c1[Y]).all(axis=1)
    ok &= (Y[:, _arr(t2)] == np.take_along_axis(C2, Y, axis=1)).all(axis=1)
    ok &= (np.sort(Y, axis=1) == np.arange(n)).all(axis=1)
    return Y, ok


def embeddings(G, T, H, omega=0, *, exhaustive=False, cap=None):
    """Witnesses x with T^x in H, one per right coset xH.

    Every x with G^x <= H can be moved by an element of H to fix omega and to
    send t1 to a chosen representative of its H_omega-class, so only those
    targets are tried; for each of them the conjugator is forced along a
    spanning tree and checked on all edges before IMBED is run.  With
    ``exhaustive`` every ordered pair of H and every omega' goes to IMBED
    directly (small cases only) and all witnesses are returned.
    """
    T = tuple(T)
    if len(T) < 2:
        raise ValueError("T needs at least two elements")
    n = G.degree
    A = H.as_array(ELEMENT_CAP if cap is None else cap)
    t1, t2 = T[:2]
    m1 = _same_cycle_type_mask(A, t1)
    m2 = _same_cycle_type_mask(A, t2)
    if exhaustive:
        if len(T) != 2:
            raise ValueError("exhaustive search is implemented for pairs only")
        for i in np.nonzero(m1)[0]:
            for j in np.nonzero(m2)[0]:
                T2 = (_perm(A[i]), _perm(A[j]))
                for w2 in range(n):
                    x = _imbed_core(T, T2, omega, w2)
                    if x is not None:
                        yield EmbeddingWitness(x, T, T2, omega, w2)
        return
    if not H.is_transitive():
        # no reduction on omega' without transitivity
        for w2 in range(n):
            yield from _reduced(G, T, H, A, m1, m2, omega, w2, stab=np.arange(n)[None, :])
        return
    stab = A[A[:, omega] == omega]
    yield from _reduced(G, T, H, A, m1, m2, omega, omega, stab)


def _reduced(G, T, H, A, m1, m2, omega, omega2, stab):
    t1, t2 = T[:2]
    extra = [_arr(t) for t in T[2:]]
    # the leading pair must act transitively; then y is forced by (t1', t2', omega')
    edges = _bfs_tree(T[:2], omega)
    C2 = A[m2]
    hset = H.element_set()
    coset_reps = []
    for c1 in _conjugacy_reps(A[m1], stab):
        Y, ok = _propagate(t1, t2, edges, omega, omega2, c1, C2)
        for idx in np.nonzero(ok)[0]:
            y = Y[idx]
            fresh = True
            for r in coset_reps:
                # y in r H  iff  r^-1 y in H; with right action r^-1 y is a -> y[r^-1[a]]
                if tuple(y[np.argsort(r)].tolist()) in hset:
                    fresh = False
                    break
            if not fresh:
                continue
            yi = np.argsort(y)
            rest = [y[t[yi]] for t in extra]  # t^y : a -> y[t[y^-1[a]]]
            if any(tuple(r.tolist()) not in hset for r in rest):
                continue
            coset_reps.append(y)
            T2 = (_perm(c1), _perm(C2[idx])) + tuple(_perm(r) for r in rest)
            x = _imbed_core(T, T2, omega, omega2)
            assert x is not None and x.images == tuple(y.tolist()), "IMBED disagrees with propagation"
            yield EmbeddingWitness(x, T, T2, omega, omega2)


# -- TWOCLOSURE -------------------------------------------------------------------

class ClosureResult(NamedTuple):
    group: PermGroup
    step: int
    below_bound: bool
    generators: int = 2


def _conjugate_elements(K, x):
    """K^x with its element list kept."""
    xa = _arr(x)
    xi = np.argsort(xa)
    A = K.as_array()
    # x^-1 k x : a -> x[k[x^-1[a]]]
    B = xa[A[:, xi]]
    return PermGroup.from_elements([tuple(r) for r in B.tolist()], K.degree)


def solve_two_closure(G, small_threshold=DEFAULT_THRESHOLD, *, all_pairs=False, cap=None):
    """G^(2) with the step of the algorithm that produced it."""
    _require_three_halves(G)
    n = G.degree
    below = n <= CLASSIFICATION_BOUND
    if n <= small_threshold:
        X = scheme_of_group(G)
        return ClosureResult(aut_oracle(X, cap=max(AUT_CAP, small_threshold)), 1, False)
    if G.is_2transitive():
        return ClosureResult(PermGroup.symmetric(n), 2, below)
    pp = prime_power(n)
    if G.is_primitive() and pp is not None:
        p, d = pp
        omega = 0
        pairs = generating_sets(G, all_pairs=all_pairs, cap=cap)
        d_used = len(pairs[0])
        if p % 2 == 1 and d % 2 == 0:
            H = as0(p, d)
            for T in pairs:
                for w in embeddings(G, T, H, omega, cap=cap):
                    Gx = G.conjugate(w.x)
                    K = bfc(Gx, H, cap=cap)
                    return ClosureResult(_conjugate_elements(K, w.x.inverse()), 4, below, d_used)
        H = agammal1(p, d)
        best = []
        best_order = 0
        for T in pairs:
            for w in embeddings(G, T, H, omega, cap=cap):
                K = bfc(G.conjugate(w.x), H, cap=cap)
                o = K.order()
                if o > best_order:
                    best, best_order = [(w.x, K)], o
                elif o == best_order:
                    best.append((w.x, K))
        if best:
            y, K = best[0]
            result = _conjugate_elements(K, y.inverse())
            if __debug__:
                for x, Kx in best[1:]:
                    assert _conjugate_elements(Kx, x.inverse()).element_set() == result.element_set()
            return ClosureResult(result, 5, below, d_used)
    return ClosureResult(G, 6, below)


def two_closure(G, small_threshold=DEFAULT_THRESHOLD, **kw):
    return solve_two_closure(G, small_threshold, **kw).group


def k_closure(G, k, budget=None, small_threshold=DEFAULT_THRESHOLD, cap=None):
    """G^(k) for 3/2-transitive, not 2-transitive G: filter G^(2) on the k-orbits of G."""
    _require_three_halves(G)
    if G.is_2transitive():
        raise PreconditionViolation("k-closure is only handled for groups that are not 2-transitive")
    if k < 2:
        raise ValueError("k must be at least 2")
    budget = TUPLE_BUDGET if budget is None else budget
    n = G.degree
    orb = k_orbits(G, k, budget)
    K2 = two_closure(G, small_threshold, cap=cap)
    if k == 2:
        return K2
    idx = np.arange(n**k, dtype=np.int64)
    digits = np.stack([(idx // n ** (k - 1 - j)) % n for j in range(k)], axis=1)
    inj = np.array([len(set(r)) == k for r in digits.tolist()], dtype=bool)
    tuples = digits[inj]
    labels = orb.labels[inj]
    A = K2.as_array(ELEMENT_CAP if cap is None else cap)
    keep = []
    step = max(1, _CHUNK // max(1, len(tuples)))
    weights = n ** np.arange(k - 1, -1, -1)
    for s in range(0, len(A), step):
        chunk = A[s:s + step]
        img = (chunk[:, tuples] * weights).sum(axis=2)
        ok = (orb.labels[img] == labels[None, :]).all(axis=1)
        keep.extend((s + np.nonzero(ok)[0]).tolist())
    return PermGroup.from_elements([tuple(A[i].tolist()) for i in keep], n)


# -- ISO ------------------------------------------------------------------------------

def _require_primitive(G):
    _require_three_halves(G)
    if not G.is_primitive():
        raise PreconditionViolation("group is not primitive")


def iso_schemes(G, G2, small_threshold=DEFAULT_THRESHOLD, cap=None):
    """Iso(Inv(G), Inv(G')) for primitive 3/2-transitive G, G'."""
    if G.degree != G2.degree:
        raise DegreeMismatch("groups act on different degrees")
    _require_primitive(G)
    _require_primitive(G2)
    n = G.degree
    if n <= small_threshold:
        return iso_oracle(scheme_of_group(G), scheme_of_group(G2), cap=max(ISO_CAP, small_threshold))
    K = two_closure(G, small_threshold, cap=cap)
    K2 = two_closure(G2, small_threshold, cap=cap)
    sym1, sym2 = K.is_symmetric(), K2.is_symmetric()
    if sym1 and sym2:
        return IsoSet.full(n)
    if sym1 or sym2 or K.order() != K2.order():
        return IsoSet.empty(n)
    T = generating_sets(K, cap=cap)[0]
    found = []
    A2 = K2.as_array(ELEMENT_CAP if cap is None else cap)
    for w in embeddings(K, T, K2, 0, cap=cap):
        xa = _arr(w.x)
        # the coset x K': a -> k[x[a]]
        found.extend(_perm(r) for r in np.take_along_axis(A2, xa[None, :].repeat(len(A2), 0), axis=1))
    return IsoSet(n, found)


def iso_colored(G, G2, psi, small_threshold=DEFAULT_THRESHOLD, cap=None):
    """Iso(Inv(G), Inv(G'), psi) under canonical color numbering."""
    if G.degree != G2.degree:
        raise DegreeMismatch("groups act on different degrees")
    _require_three_halves(G)
    _require_three_halves(G2)
    X, Y = scheme_of_group(G), scheme_of_group(G2)
    n = G.degree
    if not isinstance(psi, ColorBijection):
        psi = ColorBijection(tuple(psi))
    if X.rank != Y.rank or psi.source_rank != X.rank or not psi.is_algebraic_isomorphism(X, Y):
        raise NotAlgebraicIsomorphism("psi does not preserve the intersection numbers")
    if not G.is_primitive():
        return list_isomorphisms_bounded_base(X, Y, psi, b_max=2)
    if not G2.is_primitive():
        return IsoSet.empty(n)
    full = iso_schemes(G, G2, small_threshold, cap=cap)
    if full.symmetric:
        return IsoSet.full(n)
    m = psi.as_array()
    want = m[X.colors]
    keep = [f for f in full if (Y.colors[np.ix_(_arr(f), _arr(f))] == want).all()]
    return IsoSet(n, keep)
