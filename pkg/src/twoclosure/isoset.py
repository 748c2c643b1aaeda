"""Explicit sets of isomorphisms, with a symbolic form for all of Sym(n)."""

from __future__ import annotations

import math

from .perm import Permutation


class IsoSet:
    """A deduplicated, sorted list of permutations of degree n.

    When ``symmetric`` is set the set stands for every permutation of
    {0..n-1}; no elements are stored in that case.
    """

    def __init__(self, degree, permutations=(), *, symmetric=False):
        self.degree = degree
        self.symmetric = symmetric
        if symmetric:
            self.permutations = ()
        else:
            perms = {p if isinstance(p, Permutation) else Permutation(p) for p in permutations}
            for p in perms:
                if p.degree != degree:
                    raise ValueError(f"{p} does not have degree {degree}")
            self.permutations = tuple(sorted(perms))

    @classmethod
    def empty(cls, degree):
        return cls(degree)

    @classmethod
    def full(cls, degree):
        return cls(degree, symmetric=True)

    def __len__(self):
        return math.factorial(self.degree) if self.symmetric else len(self.permutations)

    def __bool__(self):
        return self.symmetric or bool(self.permutations)

    def __iter__(self):
        if self.symmetric:
            raise TypeError("a symbolic Sym(n) set cannot be iterated")
        return iter(self.permutations)

    def __contains__(self, p):
        if not isinstance(p, Permutation) or p.degree != self.degree:
            return False
        if self.symmetric:
            return True
        return p in set(self.permutations)

    def __eq__(self, other):
        if not isinstance(other, IsoSet):
            return NotImplemented
        return (self.degree, self.symmetric, self.permutations) == (
            other.degree, other.symmetric, other.permutations)

    def __repr__(self):
        if self.symmetric:
            return f"IsoSet(Sym({self.degree}))"
        return f"IsoSet(degree={self.degree}, size={len(self.permutations)})"
