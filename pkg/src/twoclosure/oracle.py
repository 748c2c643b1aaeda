"""Backtracking oracles for automorphisms and isomorphisms of colored pair matrices.

Deliberately self-contained: point cells are refined by counting colored
neighbours (1-dimensional refinement with individualization), the search
is plain DFS, and nothing here calls into the WL or IMBED code.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import OverCapError
from .isoset import IsoSet
from .perm import Permutation, PermGroup

AUT_CAP = int(os.environ.get("TWOCLOSURE_ORACLE_CAP", 30))
ISO_CAP = int(os.environ.get("TWOCLOSURE_ISO_ORACLE_CAP", 21))


def _matrix(X):
    return np.asarray(X.colors if hasattr(X, "colors") else X, dtype=np.int64)


def _relabel(keys):
    _, inv = np.unique(keys, axis=0, return_inverse=True)
    return inv.reshape(-1).astype(np.int64)


def _refine(mats, cells):
    """Jointly refine point cells on each side; None when the sides stop matching."""
    sides = len(mats)
    n = mats[0].shape[0]
    R = max(int(M.max()) for M in mats) + 1
    k = max(int(c.max()) for c in cells) + 1
    while True:
        blocks = []
        for M, c in zip(mats, cells):
            codes = (M * R + M.T) * k + c[None, :]
            codes.sort(axis=1)
            blocks.append(np.concatenate([c[:, None], codes], axis=1))
        ids = _relabel(np.concatenate(blocks))
        new = [ids[i * n:(i + 1) * n] for i in range(sides)]
        k_new = int(ids.max()) + 1
        h = np.bincount(new[0], minlength=k_new)
        if any((np.bincount(c, minlength=k_new) != h).any() for c in new[1:]):
            return None
        if k_new == k:
            return new
        cells, k = new, k_new


def _individualize(c, a):
    c = c.copy()
    c[a] = c.max() + 1
    return c


def _target_cell(c):
    counts = np.bincount(c)
    big = np.nonzero(counts > 1)[0]
    if len(big) == 0:
        return None
    return int(big[np.argmin(counts[big])])


def _find(MA, MB, cA, cB):
    """One isomorphism A -> B compatible with the current cells, or None."""
    k = _target_cell(cA)
    if k is None:
        f = np.empty(len(cA), dtype=np.int64)
        f[np.argsort(cA)] = np.argsort(cB)
        if (MB[np.ix_(f, f)] == MA).all():
            return f
        return None
    a = int(np.nonzero(cA == k)[0][0])
    nA = _individualize(cA, a)
    for b in np.nonzero(cB == k)[0]:
        out = _refine([MA, MB], [nA, _individualize(cB, int(b))])
        if out is None:
            continue
        f = _find(MA, MB, out[0], out[1])
        if f is not None:
            return f
    return None


def _initial(mats):
    return _refine(mats, [np.diag(M).copy() for M in mats])


def _orbit(gens, a, n):
    seen = {a}
    stack = [a]
    while stack:
        x = stack.pop()
        for g in gens:
            y = int(g[x])
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def _aut_generators(M):
    n = M.shape[0]
    start = _initial([M])[0]
    # leftmost path: individualize the least point of the smallest open cell
    path = [start]
    base = []
    c = start
    while (k := _target_cell(c)) is not None:
        b = int(np.nonzero(c == k)[0][0])
        base.append(b)
        c = _refine([M], [_individualize(c, b)])[0]
        path.append(c)
    gens = []
    for level in range(len(base) - 1, -1, -1):
        prefix = base[:level]
        c = path[level]
        b = base[level]
        cell = np.nonzero(c == c[b])[0]
        fixing = [g for g in gens if all(g[p] == p for p in prefix)]
        orb = _orbit(fixing, b, n)
        nA = _individualize(c, b)
        for x in cell:
            x = int(x)
            if x in orb:
                continue
            out = _refine([M, M], [nA, _individualize(c, x)])
            if out is None:
                continue
            f = _find(M, M, out[0], out[1])
            if f is not None:
                gens.append(f)
                fixing.append(f)
                orb = _orbit(fixing, b, n)
    return gens


def aut_oracle(X, cap=None):
    """Color-preserving automorphism group of a pair coloring."""
    M = _matrix(X)
    n = M.shape[0]
    cap = AUT_CAP if cap is None else cap
    if n > cap:
        raise OverCapError(f"oracle degree {n} exceeds cap {cap}", reached=n, cap=cap)
    diag = np.unique(np.diag(M))
    off = np.unique(M[~np.eye(n, dtype=bool)])
    if len(diag) == 1 and len(off) <= 1 and not np.isin(off, diag).any():
        # one point class and at most one off-diagonal class
        return PermGroup.symmetric(n)
    gens = [Permutation(tuple(int(v) for v in g)) for g in _aut_generators(M)]
    return PermGroup(gens, degree=n)


def _pattern_isos(MA, MB, first=False):
    """Every f with B[f(a), f(b)] determined by A[a, b] through one color bijection.

    Plain point-by-point DFS; the partial color map is kept injective both ways.
    """
    n = MA.shape[0]
    A, B = MA.tolist(), MB.tolist()
    fwd, back = {}, {}
    f = [-1] * n
    used = [False] * n
    out = []

    def bind(c, d, added):
        e = fwd.get(c)
        if e is not None:
            return e == d
        if d in back:
            return False
        fwd[c] = d
        back[d] = c
        added.append(c)
        return True

    def go(k):
        if k == n:
            out.append(tuple(f))
            return
        for v in range(n):
            if used[v] or (first and out):
                continue
            f[k] = v
            added = []
            ok = bind(A[k][k], B[v][v], added)
            j = 0
            while ok and j < k:
                u = f[j]
                ok = bind(A[k][j], B[v][u], added) and bind(A[j][k], B[u][v], added)
                j += 1
            if ok:
                used[v] = True
                go(k + 1)
                used[v] = False
            for c in added:
                del back[fwd.pop(c)]
        f[k] = -1

    go(0)
    return out


def _coset(f0, aut, n):
    if aut.is_symmetric():
        return None
    f = Permutation(tuple(int(v) for v in f0))
    return [f * a for a in aut.elements()]


def iso_oracle(X, Y, psi=None, cap=None):
    """Iso(X, Y) (psi None) or Iso(X, Y, psi) by backtracking."""
    MA, MB = _matrix(X), _matrix(Y)
    n = MA.shape[0]
    cap = ISO_CAP if cap is None else cap
    if n > cap:
        raise OverCapError(f"oracle degree {n} exceeds cap {cap}", reached=n, cap=cap)
    if MB.shape[0] != n or len(np.unique(MA)) != len(np.unique(MB)):
        return IsoSet.empty(n)
    if psi is None:
        sizes = lambda M: sorted(np.bincount(M.ravel()).tolist())
        if sizes(MA) != sizes(MB):
            return IsoSet.empty(n)
        if aut_oracle(Y, cap=max(cap, n)).is_symmetric():
            # every permutation preserving Y's partition does; X must match it
            return IsoSet.full(n) if _pattern_isos(MA, MB, first=True) else IsoSet.empty(n)
        return IsoSet(n, [Permutation(f) for f in _pattern_isos(MA, MB)])
    m = tuple(psi.mapping if hasattr(psi, "mapping") else psi)
    inv = np.empty(len(m), dtype=np.int64)
    inv[list(m)] = np.arange(len(m))
    MBm = inv[MB]
    start = _initial([MA, MBm])
    if start is None:
        return IsoSet.empty(n)
    f0 = _find(MA, MBm, start[0], start[1])
    if f0 is None:
        return IsoSet.empty(n)
    aut = aut_oracle(Y, cap=max(cap, n))
    coset = _coset(f0, aut, n)
    if coset is None:
        return IsoSet.full(n)
    return IsoSet(n, coset)
