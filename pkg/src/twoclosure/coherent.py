"""Coherent configurations and the 2-dimensional Weisfeiler-Leman closure.

A configuration is held as an n x n matrix of color ids 0..r-1.  All
refinement is done on whole numpy arrays; new color ids are always taken
from the sorted order of the refinement keys, so the numbering depends only
on the input colors and never on point labels.  That property is what lets
two configurations be refined side by side and compared round by round.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    BaseNotFound,
    DegreeMismatch,
    IncoherentInput,
    NotAlgebraicIsomorphism,
    OverBudget,
    PreconditionViolation,
)
from .isoset import IsoSet
from .perm import Permutation

DEFAULT_TUPLE_BUDGET = 10**7


class BinaryRelation:
    """A set of ordered pairs on {0..n-1}, stored as a boolean matrix."""

    __slots__ = ("matrix",)

    def __init__(self, degree, pairs=()):
        M = np.zeros((degree, degree), dtype=bool)
        for a, b in pairs:
            if not (0 <= a < degree and 0 <= b < degree):
                raise ValueError(f"pair {(a, b)} out of range for degree {degree}")
            M[a, b] = True
        M.setflags(write=False)
        self.matrix = M

    @classmethod
    def from_matrix(cls, M):
        M = np.array(M, dtype=bool)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError("relation matrix must be square")
        rel = cls.__new__(cls)
        M.setflags(write=False)
        rel.matrix = M
        return rel

    @classmethod
    def from_permutation(cls, g):
        """The functional relation {(a, a^g)}."""
        n = g.degree
        M = np.zeros((n, n), dtype=bool)
        M[np.arange(n), np.asarray(g.images)] = True
        return cls.from_matrix(M)

    @classmethod
    def diagonal(cls, n, points=None):
        pts = range(n) if points is None else points
        return cls(n, ((a, a) for a in pts))

    @property
    def degree(self):
        return self.matrix.shape[0]

    def pairs(self):
        return [(int(a), int(b)) for a, b in zip(*np.nonzero(self.matrix))]

    def transpose(self):
        return BinaryRelation.from_matrix(self.matrix.T)

    def __len__(self):
        return int(self.matrix.sum())

    def __contains__(self, pair):
        a, b = pair
        return bool(self.matrix[a, b])

    def __eq__(self, other):
        if not isinstance(other, BinaryRelation):
            return NotImplemented
        return self.matrix.shape == other.matrix.shape and bool((self.matrix == other.matrix).all())

    def __hash__(self):
        return hash((self.degree, self.matrix.tobytes()))

    def __repr__(self):
        return f"BinaryRelation(degree={self.degree}, size={len(self)})"


class CoherenceCheck(NamedTuple):
    ok: bool
    axiom: str | None = None
    triple: tuple | None = None
    pair: tuple | None = None

    def __bool__(self):
        return self.ok


class CoherentConfiguration:
    """Color matrix plus derived metadata.  Immutable; metadata is computed lazily."""

    def __init__(self, colors, *, _coherent=False):
        C = np.array(colors, dtype=np.int64)
        if C.ndim != 2 or C.shape[0] != C.shape[1] or C.shape[0] == 0:
            raise ValueError("color matrix must be square and nonempty")
        if C.min() < 0:
            raise ValueError("color ids must be nonnegative")
        r = int(C.max()) + 1
        sizes = np.bincount(C.ravel(), minlength=r)
        if (sizes == 0).any():
            raise ValueError("color ids must be exactly 0..r-1")
        C.setflags(write=False)
        sizes.setflags(write=False)
        self.colors = C
        self.degree = C.shape[0]
        self.rank = r
        self.sizes = sizes
        self._lock = threading.RLock()
        self._cache = {}
        if _coherent:
            self._cache["check"] = CoherenceCheck(True)

    def _cached(self, key, compute):
        with self._lock:
            if key not in self._cache:
                self._cache[key] = compute()
            return self._cache[key]

    @property
    def diagonal_colors(self):
        return self._cached("diag", lambda: frozenset(int(c) for c in np.unique(np.diag(self.colors))))

    @property
    def representatives(self):
        """Lexicographically least pair of each color."""
        def compute():
            _, idx = np.unique(self.colors.ravel(), return_index=True)
            n = self.degree
            return tuple((int(i) // n, int(i) % n) for i in idx)
        return self._cached("reps", compute)

    @property
    def pairing(self):
        """Color of the transpose of each color's representative pair."""
        return self._cached(
            "pairing", lambda: tuple(int(self.colors[b, a]) for a, b in self.representatives))

    def fibers(self):
        D = np.diag(self.colors)
        return [tuple(int(a) for a in np.nonzero(D == c)[0]) for c in sorted(self.diagonal_colors)]

    def is_homogeneous(self):
        return len(self.diagonal_colors) == 1

    def relation(self, c):
        return BinaryRelation.from_matrix(self.colors == c)

    def classes(self):
        return [self.relation(c) for c in range(self.rank)]

    def relabel(self, x):
        """The configuration with every pair (a, b) moved to (a^x, b^x)."""
        f = np.asarray(x.images)
        D = np.empty_like(self.colors)
        D[np.ix_(f, f)] = self.colors
        return CoherentConfiguration(D)

    def canonical(self):
        """Renumber colors by (diagonal first, class size, least member pair)."""
        diag = self.diagonal_colors
        reps = self.representatives
        order = sorted(range(self.rank), key=lambda c: (c not in diag, int(self.sizes[c]), reps[c]))
        new = np.empty(self.rank, dtype=np.int64)
        new[order] = np.arange(self.rank)
        out = CoherentConfiguration(new[self.colors])
        if "check" in self._cache and self._cache["check"].ok:
            out._cache["check"] = CoherenceCheck(True)
        return out

    def same_partition(self, other):
        """True iff both matrices induce the same partition of pairs."""
        if self.degree != other.degree or self.rank != other.rank:
            return False
        m = np.full(self.rank, -1, dtype=np.int64)
        m[self.colors.ravel()] = other.colors.ravel()
        return bool((m[self.colors] == other.colors).all())

    def is_refinement_of(self, other):
        """True iff every class of self lies inside a class of other."""
        if self.degree != other.degree:
            return False
        m = np.full(self.rank, -1, dtype=np.int64)
        m[self.colors.ravel()] = other.colors.ravel()
        return bool((m[self.colors] == other.colors).all())

    def __eq__(self, other):
        if not isinstance(other, CoherentConfiguration):
            return NotImplemented
        return self.colors.shape == other.colors.shape and bool((self.colors == other.colors).all())

    __hash__ = None

    def __repr__(self):
        return f"CoherentConfiguration(degree={self.degree}, rank={self.rank})"


@dataclass(frozen=True)
class ColorBijection:
    """A bijection between the color sets of two configurations of equal rank."""

    mapping: tuple

    def __post_init__(self):
        m = tuple(int(c) for c in self.mapping)
        if sorted(m) != list(range(len(m))):
            raise ValueError("color map is not a bijection of 0..r-1")
        object.__setattr__(self, "mapping", m)

    @classmethod
    def identity(cls, r):
        return cls(tuple(range(r)))

    @classmethod
    def from_pairs(cls, pairs, r=None):
        d = dict(pairs)
        r = len(d) if r is None else r
        if set(d) != set(range(r)):
            raise ValueError("color map must cover every source color")
        return cls(tuple(d[c] for c in range(r)))

    @classmethod
    def induced(cls, X, Y, f):
        """Color map induced by a permutation f; None unless f maps classes onto classes."""
        if X.degree != Y.degree or X.rank != Y.rank:
            return None
        fi = np.asarray(f.images)
        target = Y.colors[np.ix_(fi, fi)]
        m = np.full(X.rank, -1, dtype=np.int64)
        m[X.colors.ravel()] = target.ravel()
        if not (m[X.colors] == target).all() or len(set(m.tolist())) != X.rank:
            return None
        return cls(tuple(m.tolist()))

    @property
    def source_rank(self):
        return len(self.mapping)

    def __call__(self, c):
        return self.mapping[c]

    def as_array(self):
        return np.asarray(self.mapping, dtype=np.int64)

    def inverse(self):
        inv = [0] * len(self.mapping)
        for c, d in enumerate(self.mapping):
            inv[d] = c
        return ColorBijection(tuple(inv))

    def is_identity(self):
        return self.mapping == tuple(range(len(self.mapping)))

    def preserves_basics(self, X, Y):
        """Sizes, diagonal status and pairing are carried over."""
        if X.rank != self.source_rank or Y.rank != self.source_rank:
            return False
        m = self.mapping
        for c in range(X.rank):
            if X.sizes[c] != Y.sizes[m[c]]:
                return False
            if (c in X.diagonal_colors) != (m[c] in Y.diagonal_colors):
                return False
            if m[X.pairing[c]] != Y.pairing[m[c]]:
                return False
        return True

    def is_algebraic_isomorphism(self, X, Y):
        if X.degree != Y.degree or not self.preserves_basics(X, Y):
            return False
        m = self.mapping
        mapped = {(m[r], m[s], m[t]): v for (r, s, t), v in intersection_numbers(X).items()}
        return mapped == intersection_numbers(Y)


# -- refinement core ---------------------------------------------------------

def _wl_keys(C, r):
    # key of (a, b): old color, then sorted codes color(a,g)*r + color(g,b) over g
    n = C.shape[0]
    codes = C[:, None, :] * r + C.T[None, :, :]
    codes.sort(axis=2)
    return np.concatenate([C.reshape(n, n, 1), codes], axis=2).reshape(n * n, n + 1)


def _unique_ids(keys):
    # rows become big-endian byte strings, so byte order is numeric row order
    shifted = keys + 1
    dt = ">u4" if shifted.max(initial=0) < 2**32 else ">u8"
    rows = np.ascontiguousarray(shifted.astype(dt))
    view = rows.view(np.dtype((np.void, rows.itemsize * rows.shape[1]))).ravel()
    uniq, inv = np.unique(view, return_inverse=True)
    return inv.reshape(-1).astype(np.int64), len(uniq)


def _split(ids, sides, n):
    return [ids[i * n * n:(i + 1) * n * n].reshape(n, n) for i in range(sides)]


def _same_histograms(mats, r):
    if len(mats) == 1:
        return True
    h0 = np.bincount(mats[0].ravel(), minlength=r)
    return all((np.bincount(M.ravel(), minlength=r) == h0).all() for M in mats[1:])


def _initial_keys(n, relations=(), colorings=(), points=()):
    cols = [np.eye(n, dtype=np.int64)]
    for R in relations:
        R = np.asarray(R, dtype=np.int64)
        cols += [R, R.T]
    for C in colorings:
        C = np.asarray(C, dtype=np.int64)
        cols += [C, C.T]
    if len(points):
        M = np.full((n, n), -1, dtype=np.int64)
        for i, a in enumerate(points):
            M[a, a] = i
        cols.append(M)
    return np.stack([c.reshape(-1) for c in cols], axis=1)


def _refine_joint(key_blocks, n):
    """Refine one or more colorings in a shared id space.

    ``key_blocks`` holds initial keys per side.  Returns the stable color
    matrices, or None as soon as the color histograms of the sides differ.
    """
    sides = len(key_blocks)
    ids, r = _unique_ids(np.concatenate(key_blocks))
    mats = _split(ids, sides, n)
    if not _same_histograms(mats, r):
        return None
    while True:
        keys = np.concatenate([_wl_keys(M, r) for M in mats])
        ids, r_new = _unique_ids(keys)
        new = _split(ids, sides, n)
        if not _same_histograms(new, r_new):
            return None
        if r_new == r:
            return new
        mats, r = new, r_new


def _stable(C):
    """WL-stable refinement of a single color matrix."""
    return _refine_joint([_initial_keys(C.shape[0], colorings=[C])], C.shape[0])[0]


def _profiles(C, r):
    n = C.shape[0]
    codes = C[:, None, :] * r + C.T[None, :, :]
    codes.sort(axis=2)
    return codes.reshape(n * n, n)


def _regular_mask(C):
    if C.shape[0] == 1:
        return np.ones(1, dtype=bool)
    S = np.sort(C, axis=1)
    return ~(S[:, 1:] == S[:, :-1]).any(axis=1)


def _iso_from_regular(C, D, m, a, a2):
    """Propagate the unique candidate a -> a2 and verify it; None on failure."""
    n = C.shape[0]
    if m[C[a, a]] != D[a2, a2]:
        return None
    where = np.full(int(D.max()) + 1, -1, dtype=np.int64)
    where[D[a2]] = np.arange(n)
    f = where[m[C[a]]]
    if (f < 0).any() or len(np.unique(f)) != n:
        return None
    if not (D[np.ix_(f, f)] == m[C]).all():
        return None
    return Permutation._raw(tuple(int(v) for v in f))


def _as_matrix(rel, n=None):
    if isinstance(rel, BinaryRelation):
        return rel.matrix
    M = np.asarray(rel)
    if M.dtype == bool and M.ndim == 2:
        return M
    if n is None:
        raise ValueError("a pair list needs an explicit degree")
    return BinaryRelation(n, rel).matrix


def _relation_matrices(P, degree=None):
    mats = []
    for rel in P:
        M = _as_matrix(rel, degree)
        if degree is None:
            degree = M.shape[0]
        if M.shape != (degree, degree):
            raise DegreeMismatch(f"relation of degree {M.shape[0]} among relations of degree {degree}")
        mats.append(M)
    if degree is None:
        raise ValueError("cannot infer the degree of an empty relation list")
    return mats, degree


# -- public operations -------------------------------------------------------

class TupleOrbits(NamedTuple):
    degree: int
    k: int
    labels: np.ndarray
    representatives: list

    @property
    def count(self):
        return len(self.representatives)

    def label(self, tup):
        idx = 0
        for a in tup:
            idx = idx * self.degree + a
        return int(self.labels[idx])


def k_orbits(G, k, budget=DEFAULT_TUPLE_BUDGET):
    """Orbits of G on k-tuples.

    Tuples are indexed base n, first coordinate most significant.  Orbit
    labels follow the order of each orbit's least tuple.
    """
    n = G.degree
    if k < 1:
        raise ValueError("k must be positive")
    N = n**k
    if N > budget:
        raise OverBudget(f"{n}^{k} = {N} tuples exceeds budget {budget}")
    idx = np.arange(N, dtype=np.int64)
    digits = [(idx // n ** (k - 1 - j)) % n for j in range(k)]
    rows, cols = [], []
    for g in G.generators:
        img = np.asarray(g.images, dtype=np.int64)
        target = np.zeros(N, dtype=np.int64)
        for j in range(k):
            target = target * n + img[digits[j]]
        rows.append(idx)
        cols.append(target)
    if rows:
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        graph = csr_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(N, N))
        count, comp = connected_components(graph, directed=True, connection="weak")
    else:
        count, comp = N, idx.copy()
    mins = np.full(count, N, dtype=np.int64)
    np.minimum.at(mins, comp, idx)
    order = np.argsort(mins, kind="stable")
    rank = np.empty(count, dtype=np.int64)
    rank[order] = np.arange(count)
    labels = rank[comp]
    labels.setflags(write=False)
    reps = []
    for m in mins[order]:
        m = int(m)
        reps.append(tuple((m // n ** (k - 1 - j)) % n for j in range(k)))
    return TupleOrbits(n, k, labels, reps)


def scheme_of_group(G):
    """Inv(G): the 2-orbits of G, canonically numbered."""
    n = G.degree
    orb = k_orbits(G, 2, budget=n * n)
    return CoherentConfiguration(orb.labels.reshape(n, n), _coherent=True).canonical()


def verify_coherent(X):
    """Check C1-C3 by direct counting; returns a CoherenceCheck with a witness on failure."""
    if not isinstance(X, CoherentConfiguration):
        X = CoherentConfiguration(X)
    if "check" in X._cache:
        return X._cache["check"]
    C = X.colors
    n, r = X.degree, X.rank
    result = None
    diag = np.array(sorted(X.diagonal_colors), dtype=np.int64)
    off = ~np.eye(n, dtype=bool)
    bad = off & np.isin(C, diag)
    if bad.any():
        a, b = (int(v) for v in np.argwhere(bad)[0])
        result = CoherenceCheck(False, "C1", None, (a, b))
    if result is None:
        pair = np.asarray(X.pairing, dtype=np.int64)
        bad = pair[C] != C.T
        if bad.any():
            a, b = (int(v) for v in np.argwhere(bad)[0])
            result = CoherenceCheck(False, "C2", None, (a, b))
    if result is None:
        P = _profiles(C, r)
        _, rep_idx = np.unique(C.ravel(), return_index=True)
        rows = P[rep_idx[C.ravel()]]
        bad = (P != rows).any(axis=1)
        if bad.any():
            k = int(np.nonzero(bad)[0][0])
            t = int(C.ravel()[k])
            u, cu = np.unique(P[k], return_counts=True)
            v, cv = np.unique(P[rep_idx[t]], return_counts=True)
            a_counts = dict(zip(u.tolist(), cu.tolist()))
            b_counts = dict(zip(v.tolist(), cv.tolist()))
            code = min(c for c in set(a_counts) | set(b_counts) if a_counts.get(c) != b_counts.get(c))
            result = CoherenceCheck(False, "C3", (code // r, code % r, t), (k // n, k % n))
    if result is None:
        result = CoherenceCheck(True)
    with X._lock:
        X._cache["check"] = result
    return result


def _require_coherent(X):
    chk = verify_coherent(X)
    if not chk.ok:
        raise IncoherentInput(f"axiom {chk.axiom} fails (triple {chk.triple}, pair {chk.pair})")


def intersection_numbers(X):
    """Nonzero intersection numbers {(r, s, t): c_rs^t}."""
    _require_coherent(X)

    def compute():
        C, r = X.colors, X.rank
        out = {}
        for t, (a, b) in enumerate(X.representatives):
            codes = C[a, :] * r + C[:, b]
            u, cnt = np.unique(codes, return_counts=True)
            for code, c in zip(u.tolist(), cnt.tolist()):
                out[(code // r, code % r, t)] = c
        return out

    return X._cached("tensor", compute)


def wl_closure(P, degree=None):
    """The smallest coherent configuration having every relation of P as a union of classes."""
    mats, n = _relation_matrices(P, degree)
    C = _refine_joint([_initial_keys(n, relations=mats)], n)[0]
    return CoherentConfiguration(C)


def _reorder(P2, psi):
    if psi is None:
        return list(P2)
    psi = list(psi)
    if sorted(psi) != list(range(len(P2))):
        raise ValueError("psi must be a bijection between the relation lists")
    return [P2[j] for j in psi]


def joint_wl_closure(P, P2, psi=None):
    """(WL(P), WL(P'), phi) with phi extending psi, or None if no algebraic isomorphism exists.

    psi[i] is the index in P' matched to P[i].
    """
    if len(P) != len(P2):
        raise ValueError("relation lists differ in length")
    mats, n = _relation_matrices(P)
    mats2, n2 = _relation_matrices(_reorder(list(P2), psi)) if P2 else ([], n)
    if n != n2:
        raise DegreeMismatch(f"degrees {n} and {n2} differ")
    out = _refine_joint([_initial_keys(n, relations=mats), _initial_keys(n, relations=mats2)], n)
    if out is None:
        return None
    X, Y = CoherentConfiguration(out[0]), CoherentConfiguration(out[1])
    return X, Y, ColorBijection.identity(X.rank)


def algebraic_isomorphism(P, P2, psi=None):
    res = joint_wl_closure(P, P2, psi)
    return None if res is None else res[2]


def point_extension(X, points):
    n = X.degree
    for a in points:
        if not 0 <= a < n:
            raise ValueError(f"point {a} out of range")
    C = _refine_joint([_initial_keys(n, colorings=[X.colors], points=list(points))], n)[0]
    return CoherentConfiguration(C)


def _joint_extension(X, Y, phi, pts, pts2):
    """Jointly extend X at pts and Y at pts2, matching colors through phi."""
    n = X.degree
    back = phi.inverse().as_array()
    out = _refine_joint([
        _initial_keys(n, colorings=[X.colors], points=list(pts)),
        _initial_keys(n, colorings=[back[Y.colors]], points=list(pts2)),
    ], n)
    return out


def regular_points(X):
    _require_coherent(X)
    return frozenset(int(a) for a in np.nonzero(_regular_mask(X.colors))[0])


def is_semiregular(X):
    _require_coherent(X)
    return bool(_regular_mask(X.colors).all())


def is_complete(X):
    _require_coherent(X)
    return X.rank == X.degree**2


def is_three_halves_homogeneous(X):
    _require_coherent(X)
    if not X.is_homogeneous():
        return False
    off = [int(X.sizes[c]) for c in range(X.rank) if c not in X.diagonal_colors]
    return len(set(off)) <= 1


def iso_from_regular_point(X, Y, phi, alpha, alpha2):
    """The unique isomorphism in Iso(X, Y, phi) taking alpha to alpha2, or None."""
    if X.degree != Y.degree:
        raise DegreeMismatch(f"degrees {X.degree} and {Y.degree} differ")
    if not _regular_mask(X.colors)[alpha]:
        raise PreconditionViolation(f"point {alpha} is not regular")
    if not _regular_mask(Y.colors)[alpha2]:
        raise PreconditionViolation(f"point {alpha2} is not regular in the target")
    return _iso_from_regular(X.colors, Y.colors, phi.as_array(), alpha, alpha2)


def find_base(X, b_max):
    """First point tuple (lexicographic, by size) whose extension has a regular point."""
    n = X.degree
    for size in range(b_max + 1):
        for pts in itertools.combinations(range(n), size):
            E = point_extension(X, pts)
            reg = np.nonzero(_regular_mask(E.colors))[0]
            if len(reg):
                return pts, E, int(reg[0])
    raise BaseNotFound(f"no base of size <= {b_max} gives a 1-regular extension")


def list_isomorphisms_bounded_base(X, Y, psi, b_max=2):
    """All of Iso(X, Y, psi), by extending at a small base and propagating."""
    if X.degree != Y.degree:
        raise DegreeMismatch(f"degrees {X.degree} and {Y.degree} differ")
    _require_coherent(X)
    _require_coherent(Y)
    if psi is None:
        psi = ColorBijection.identity(X.rank)
    if not psi.is_algebraic_isomorphism(X, Y):
        raise NotAlgebraicIsomorphism("psi does not preserve the intersection numbers")
    n = X.degree
    base, _, alpha = find_base(X, b_max)
    m = psi.as_array()
    ident = np.arange(n * n, dtype=np.int64)
    found = []
    for image in itertools.permutations(range(n), len(base)):
        out = _joint_extension(X, Y, psi, base, image)
        if out is None:
            continue
        E, F = out
        # F is in X's color space for the original colors; candidates share alpha's fiber
        cand = np.nonzero((np.diag(F) == E[alpha, alpha]) & _regular_mask(F))[0]
        for a2 in cand:
            f = _iso_from_regular(E, F, ident, alpha, int(a2))
            if f is None:
                continue
            fi = np.asarray(f.images)
            if (Y.colors[np.ix_(fi, fi)] == m[X.colors]).all():
                found.append(f)
    return IsoSet(n, found)
