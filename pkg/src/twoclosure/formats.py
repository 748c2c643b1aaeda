"""Text formats: group files, scheme files, relation lists, color maps, isomorphism lists.

Lines starting with '#' and blank lines are ignored on input, so command
output can carry comment lines and still parse as the file it contains.
"""

from __future__ import annotations

import re

import numpy as np

from .coherent import BinaryRelation, ColorBijection, CoherentConfiguration
from .perm import Permutation, PermGroup

_CYCLE = re.compile(r"\(([^()]*)\)")


class FormatError(ValueError):
    pass


def _lines(text):
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def _ints(line, what):
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        raise FormatError(f"{what}: expected integers, got {line!r}") from None


def parse_permutation(line, n):
    line = line.strip()
    if line.startswith("("):
        if _CYCLE.sub("", line).strip():
            raise FormatError(f"malformed cycle notation {line!r}")
        cycles = [_ints(body.replace(",", " "), "cycle") for body in _CYCLE.findall(line)]
        try:
            return Permutation.from_cycles(n, cycles)
        except ValueError as e:
            raise FormatError(str(e)) from None
    images = _ints(line, "image table")
    if len(images) != n:
        raise FormatError(f"image table has {len(images)} entries, expected {n}")
    try:
        return Permutation(images)
    except ValueError as e:
        raise FormatError(str(e)) from None


def parse_group(text):
    lines = _lines(text)
    if not lines:
        raise FormatError("empty group file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "perm-group":
        raise FormatError(f"bad header {lines[0]!r}, expected 'perm-group <n>'")
    n = _ints(head[1], "degree")[0]
    if n < 1:
        raise FormatError("degree must be positive")
    return PermGroup([parse_permutation(ln, n) for ln in lines[1:]], n)


def format_group(G, generators=None):
    gens = G.generators if generators is None else generators
    out = [f"perm-group {G.degree}"]
    out += [" ".join(map(str, g.images)) for g in gens]
    return "\n".join(out) + "\n"


def parse_scheme(text):
    lines = _lines(text)
    if not lines:
        raise FormatError("empty scheme file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "coherent-config":
        raise FormatError(f"bad header {lines[0]!r}, expected 'coherent-config <n> <r>'")
    n, r = _ints(" ".join(head[1:]), "header")
    rows = [_ints(ln, "color row") for ln in lines[1:]]
    if len(rows) != n or any(len(row) != n for row in rows):
        raise FormatError(f"expected {n} rows of {n} colors")
    M = np.array(rows, dtype=np.int64)
    if M.min() < 0 or M.max() >= r:
        raise FormatError(f"color ids must lie in 0..{r - 1}")
    try:
        X = CoherentConfiguration(M)
    except ValueError as e:
        raise FormatError(str(e)) from None
    if X.rank != r:
        raise FormatError(f"header says rank {r} but {X.rank} colors occur")
    return X


def format_scheme(X):
    out = [f"coherent-config {X.degree} {X.rank}"]
    out += [" ".join(map(str, row)) for row in X.colors.tolist()]
    return "\n".join(out) + "\n"


def parse_relations(text):
    """'relations <n> <m>' then m lines, each a flat list 'a1 b1 a2 b2 ...'."""
    lines = _lines(text)
    if not lines:
        raise FormatError("empty relations file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "relations":
        raise FormatError(f"bad header {lines[0]!r}, expected 'relations <n> <m>'")
    n, m = _ints(" ".join(head[1:]), "header")
    body = lines[1:]
    if len(body) != m:
        raise FormatError(f"expected {m} relation lines, found {len(body)}")
    rels = []
    for ln in body:
        v = _ints(ln, "relation")
        if len(v) % 2:
            raise FormatError("relation line has an odd number of entries")
        try:
            rels.append(BinaryRelation(n, zip(v[0::2], v[1::2])))
        except ValueError as e:
            raise FormatError(str(e)) from None
    return n, rels


def parse_scheme_or_relations(text):
    lines = _lines(text)
    if lines and lines[0].startswith("relations"):
        return parse_relations(text)
    X = parse_scheme(text)
    return X.degree, X.classes()


def parse_psi(text, rank):
    pairs = []
    for ln in _lines(text):
        v = _ints(ln, "color pair")
        if len(v) != 2:
            raise FormatError(f"expected '<color> <color>', got {ln!r}")
        pairs.append(tuple(v))
    src = [a for a, _ in pairs]
    if sorted(src) != list(range(rank)) or sorted(b for _, b in pairs) != list(range(rank)):
        raise FormatError(f"color map must be a bijection of 0..{rank - 1}")
    return ColorBijection.from_pairs(pairs, rank)


def format_isoset(S):
    if S.symmetric:
        return f"SYM {S.degree}\n"
    if not S:
        return "EMPTY\n"
    return "".join(" ".join(map(str, p.images)) + "\n" for p in S.permutations)
