"""Permutations of {0..n-1} and groups given by generating lists.

Permutations act on the right: ``p * q`` applies ``p`` first, so that
``a^(pq) = (a^p)^q``.  Conjugation follows the same convention,
``p.conjugate(x) = x^-1 p x``.

Group elements are ordered lexicographically by image table.  Every
listing produced here (elements, generating pairs, isomorphism sets) uses
that order, so outputs are reproducible run to run.
"""

from __future__ import annotations

import math
import threading
from collections import deque
from functools import total_ordering
from operator import itemgetter

import numpy as np

from .errors import OverCap, OverCapError, PreconditionViolation

DEFAULT_ELEMENT_CAP = 10**7


def _compose(a, b):
    # a first, then b
    if len(a) > 1:
        return itemgetter(*a)(b)
    return tuple(b[i] for i in a)


def _invert(a):
    inv = [0] * len(a)
    for i, j in enumerate(a):
        inv[j] = i
    return tuple(inv)


def _cycles(a):
    seen = [False] * len(a)
    out = []
    for i in range(len(a)):
        if seen[i]:
            continue
        cyc = [i]
        seen[i] = True
        j = a[i]
        while j != i:
            seen[j] = True
            cyc.append(j)
            j = a[j]
        out.append(tuple(cyc))
    return out


@total_ordering
class Permutation:
    """A bijection of {0..n-1} stored as its image table."""

    __slots__ = ("images",)

    def __init__(self, images):
        images = tuple(int(i) for i in images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a permutation: {images!r}")
        self.images = images

    @classmethod
    def _raw(cls, images):
        p = cls.__new__(cls)
        p.images = images
        return p

    @classmethod
    def identity(cls, n):
        return cls._raw(tuple(range(n)))

    @classmethod
    def from_cycles(cls, n, cycles):
        """Build from disjoint cycles, e.g. ``from_cycles(5, [(0, 1, 2)])``."""
        img = list(range(n))
        seen = set()
        for cyc in cycles:
            cyc = [int(c) for c in cyc]
            for c in cyc:
                if not 0 <= c < n or c in seen:
                    raise ValueError(f"bad cycle {cyc!r} for degree {n}")
                seen.add(c)
            for k, c in enumerate(cyc):
                img[c] = cyc[(k + 1) % len(cyc)]
        return cls._raw(tuple(img))

    @property
    def degree(self):
        return len(self.images)

    def __call__(self, a):
        return self.images[a]

    def __mul__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        if len(other.images) != len(self.images):
            raise ValueError("degree mismatch")
        return Permutation._raw(_compose(self.images, other.images))

    def inverse(self):
        return Permutation._raw(_invert(self.images))

    def __pow__(self, k):
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = Permutation.identity(self.degree)
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self, x):
        """Return ``x^-1 * self * x``."""
        a, xi = self.images, x.images
        out = [0] * len(a)
        for i, j in enumerate(a):
            out[xi[i]] = xi[j]
        return Permutation._raw(tuple(out))

    def cycles(self):
        """Nontrivial cycles, each starting at its smallest point."""
        return [c for c in _cycles(self.images) if len(c) > 1]

    def cycle_type(self):
        return cycle_type(self)

    def order(self):
        return math.lcm(*(len(c) for c in _cycles(self.images))) if self.images else 1

    def is_identity(self):
        return all(i == j for i, j in enumerate(self.images))

    def fixed_points(self):
        return [i for i, j in enumerate(self.images) if i == j]

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __lt__(self, other):
        return self.images < other.images

    def __hash__(self):
        return hash(self.images)

    def __str__(self):
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc)

    def __repr__(self):
        return f"Permutation({self}, degree={self.degree})"


def cycle_type(g):
    """Multiset of cycle lengths of ``g`` (fixed points included), ascending."""
    images = g.images if isinstance(g, Permutation) else tuple(g)
    return tuple(sorted(len(c) for c in _cycles(images)))


class PermGroup:
    """A permutation group given by generators.

    Orbits, order and the element list are computed on first use and cached.
    Instances are never mutated after construction, so sharing one between
    threads is safe.
    """

    def __init__(self, generators=(), degree=None, *, name=None):
        gens = [g if isinstance(g, Permutation) else Permutation(g) for g in generators]
        if degree is None:
            if not gens:
                raise ValueError("degree is required for a group without generators")
            degree = gens[0].degree
        for g in gens:
            if g.degree != degree:
                raise ValueError(f"generator {g} does not have degree {degree}")
        self.degree = int(degree)
        self.generators = tuple(gens)
        self.name = name
        self._lock = threading.RLock()
        self._cache = {}

    # -- construction helpers -------------------------------------------------

    @classmethod
    def symmetric(cls, n):
        if n >= 3:
            gens = [Permutation._raw(tuple(range(1, n)) + (0,)),
                    Permutation.from_cycles(n, [(0, 1)])]
        elif n == 2:
            gens = [Permutation.from_cycles(2, [(0, 1)])]
        else:
            gens = []
        G = cls(gens, n, name=f"Sym({n})")
        G._cache["order"] = math.factorial(n)
        return G

    @classmethod
    def from_elements(cls, elements, degree, *, name=None):
        """Group whose element set is exactly ``elements`` (assumed closed).

        A generating set is chosen greedily in element order, adding an
        element only when it lies outside the subgroup generated so far;
        this keeps the list no longer than log2 of the order.
        """
        tuples = sorted({e.images if isinstance(e, Permutation) else tuple(e) for e in elements})
        current = {tuple(range(degree))}
        gens = []
        for t in tuples:
            if t in current:
                continue
            gens.append(t)
            current = _closure_from(current, gens)
        if len(current) != len(tuples):
            raise ValueError("element list is not closed under composition")
        G = cls([Permutation._raw(g) for g in gens], degree, name=name)
        G._cache["elements"] = tuples
        G._cache["order"] = len(tuples)
        return G

    def _cached(self, key, compute):
        with self._lock:
            if key not in self._cache:
                self._cache[key] = compute()
            return self._cache[key]

    @property
    def _moving(self):
        return [g.images for g in self.generators if not g.is_identity()]

    # -- orbits and stabilizers -----------------------------------------------

    def orbit(self, alpha):
        if not 0 <= alpha < self.degree:
            raise ValueError(f"point {alpha} out of range")
        return frozenset(self._transversal(alpha))

    def orbits(self):
        """Orbit partition, each orbit sorted, orbits ordered by least point."""
        def compute():
            seen = set()
            out = []
            for a in range(self.degree):
                if a not in seen:
                    orb = self.orbit(a)
                    seen |= orb
                    out.append(tuple(sorted(orb)))
            return out
        return self._cached("orbits", compute)

    def _transversal(self, alpha):
        """Map each point of the orbit of ``alpha`` to an image tuple sending alpha there."""
        def compute():
            n = self.degree
            trans = {alpha: tuple(range(n))}
            queue = deque([alpha])
            gens = self._moving
            while queue:
                b = queue.popleft()
                u = trans[b]
                for s in gens:
                    c = s[b]
                    if c not in trans:
                        trans[c] = _compose(u, s)
                        queue.append(c)
            return trans
        return self._cached(("transversal", alpha), compute)

    def point_stabilizer_generators(self, alpha):
        """Schreier generators of the stabilizer of ``alpha``."""
        def compute():
            trans = self._transversal(alpha)
            inv = {b: _invert(u) for b, u in trans.items()}
            ident = tuple(range(self.degree))
            out = set()
            for b, u in trans.items():
                for s in self._moving:
                    h = _compose(_compose(u, s), inv[s[b]])
                    if h != ident:
                        out.add(h)
            return [Permutation._raw(h) for h in sorted(out)]
        return self._cached(("stabilizer", alpha), compute)

    def stabilizer(self, alpha):
        return PermGroup(self.point_stabilizer_generators(alpha), self.degree)

    def suborbits(self, alpha=0):
        """Orbits of the stabilizer of ``alpha`` on the remaining points."""
        def compute():
            S = self.stabilizer(alpha)
            return [o for o in S.orbits() if o != (alpha,)]
        return self._cached(("suborbits", alpha), compute)

    # -- structural predicates ------------------------------------------------

    def is_transitive(self):
        return self.degree >= 1 and len(self.orbit(0)) == self.degree

    def _require_transitive(self, what):
        if not self.is_transitive():
            raise PreconditionViolation(f"{what} requires a transitive group")

    def rank(self):
        """Number of 2-orbits of a transitive group."""
        self._require_transitive("rank")
        return 1 + len(self.suborbits(0))

    def is_2transitive(self):
        return self.is_transitive() and self.rank() == 2

    def is_three_halves_transitive(self):
        if self.degree < 2 or not self.is_transitive():
            return False
        sizes = {len(o) for o in self.suborbits(0)}
        return len(sizes) == 1 and sizes.pop() >= 2

    def is_primitive(self):
        self._require_transitive("is_primitive")
        n = self.degree
        if n <= 2:
            return True
        gens = self._moving
        for orb in self.suborbits(0):
            if len(_minimal_block(n, gens, orb[0])) < n:
                return False
        return True

    def minimal_block(self, beta):
        """Smallest block of imprimitivity containing 0 and ``beta``."""
        self._require_transitive("minimal_block")
        return _minimal_block(self.degree, self._moving, beta)

    def is_frobenius(self):
        """Transitive, nonregular, and no nonidentity element fixes two points."""
        self._require_transitive("is_frobenius")
        stab = self.order() // self.degree
        if stab == 1:
            return False
        return all(len(o) == stab for o in self.suborbits(0))

    # -- order, elements, membership ------------------------------------------

    def _sympy(self):
        def compute():
            from sympy.combinatorics import Permutation as SPerm, PermutationGroup
            gens = [SPerm(list(g)) for g in self._moving] or [SPerm(list(range(self.degree)))]
            return PermutationGroup(gens)
        return self._cached("sympy", compute)

    def order(self, cap=None):
        """|G|, or an ``OverCap`` value when ``cap`` is given and exceeded."""
        o = self._cached("order", lambda: int(self._sympy().order()) if self._moving else 1)
        if cap is not None and o > cap:
            return OverCap(o, cap)
        return o

    def enumerate_elements(self, cap=DEFAULT_ELEMENT_CAP):
        """All elements in lexicographic order, or ``OverCap`` past ``cap``."""
        if cap < 1:
            raise ValueError("cap must be at least 1")
        o = self.order(cap)
        if isinstance(o, OverCap):
            return o
        return [Permutation._raw(t) for t in self._element_tuples()]

    def elements(self, cap=DEFAULT_ELEMENT_CAP):
        """Like :meth:`enumerate_elements` but raising ``OverCapError``."""
        res = self.enumerate_elements(cap)
        if isinstance(res, OverCap):
            raise OverCapError(f"group order {res.reached} exceeds cap {cap}", res.reached, cap)
        return res

    def _element_tuples(self):
        def compute():
            ident = tuple(range(self.degree))
            return sorted(_closure_from({ident}, self._moving))
        return self._cached("elements", compute)

    def element_set(self):
        return self._cached("element_set", lambda: frozenset(self._element_tuples()))

    def as_array(self, cap=DEFAULT_ELEMENT_CAP):
        """Elements as an ``(order, degree)`` integer array, rows sorted."""
        def compute():
            self.elements(cap)
            arr = np.array(self._element_tuples(), dtype=np.int64).reshape(-1, self.degree)
            arr.setflags(write=False)
            return arr
        return self._cached("array", compute)

    def __contains__(self, g):
        images = g.images if isinstance(g, Permutation) else tuple(g)
        if len(images) != self.degree:
            return False
        if "elements" in self._cache:
            return images in self.element_set()
        from sympy.combinatorics import Permutation as SPerm
        return bool(self._sympy().contains(SPerm(list(images))))

    def is_subgroup_of(self, other):
        return self.degree == other.degree and all(g in other for g in self.generators)

    def equals(self, other):
        """Same set of elements (checked by mutual generator membership)."""
        return self.is_subgroup_of(other) and other.is_subgroup_of(self)

    def conjugate(self, x):
        """The group ``x^-1 G x``."""
        return PermGroup([g.conjugate(x) for g in self.generators], self.degree)

    def is_symmetric(self):
        return self.is_transitive() and self.order() == math.factorial(self.degree)

    def small_generating_set(self):
        """A generating list of at most max(2, log2 |G|) elements, deterministic."""
        if self.is_symmetric():
            return list(PermGroup.symmetric(self.degree).generators)
        gens = []
        sub = PermGroup([], self.degree)
        for g in sorted(self.generators):
            if g not in sub:
                gens.append(g)
                sub = PermGroup(gens, self.degree)
        return gens

    def __repr__(self):
        label = self.name or f"<{len(self.generators)} generators>"
        return f"PermGroup({label}, degree={self.degree})"


def _closure_from(start, gens):
    elements = set(start)
    queue = deque(elements)
    while queue:
        x = queue.popleft()
        for s in gens:
            y = _compose(x, s)
            if y not in elements:
                elements.add(y)
                queue.append(y)
    return elements


def _minimal_block(n, gens, beta):
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    parent[find(beta)] = find(0)
    queue = deque([(0, beta)])
    while queue:
        a, b = queue.popleft()
        for s in gens:
            x, y = find(s[a]), find(s[b])
            if x != y:
                parent[y] = x
                queue.append((s[a], s[b]))
    root = find(0)
    return frozenset(a for a in range(n) if find(a) == root)


def generated_order_at_least(gens, degree, target):
    """True when the group generated by ``gens`` has at least ``target`` elements."""
    ident = tuple(range(degree))
    gens = [g.images if isinstance(g, Permutation) else g for g in gens]
    elements = {ident}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for s in gens:
            y = _compose(x, s)
            if y not in elements:
                elements.add(y)
                if len(elements) >= target:
                    return True
                queue.append(y)
    return len(elements) >= target
