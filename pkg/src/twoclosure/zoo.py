"""Finite fields and the affine permutation groups built on them.

Field elements and vectors are indexed by their coefficient vectors read as
base-p integers, constant coefficient least significant: the element
``c0 + c1*x + ... `` of GF(p^d) is point ``c0 + c1*p + ...``.  Every
constructor below uses this indexing, so building the same group twice
gives elementwise identical permutations.
"""

from __future__ import annotations

import numpy as np

from .errors import BadParameters, NotPrime, SingularMatrix
from .perm import Permutation, PermGroup


def is_prime(p):
    if p < 2:
        return False
    return all(p % k for k in range(2, int(p**0.5) + 1))


def prime_power(n):
    """``(p, d)`` with ``n == p**d`` and p prime, or None."""
    if n < 2:
        return None
    for p in range(2, n + 1):
        if n % p == 0:
            d = 0
            m = n
            while m % p == 0:
                m //= p
                d += 1
            return (p, d) if m == 1 else None
    return None


def _prime_factors(m):
    out = []
    k = 2
    while k * k <= m:
        if m % k == 0:
            out.append(k)
            while m % k == 0:
                m //= k
        k += 1
    if m > 1:
        out.append(m)
    return out


# -- polynomials over GF(p), coefficient lists with constant term first ------

def _poly_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, m, p):
    a = _poly_trim(a)
    m = _poly_trim(m)
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        coef = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * c) % p
        a = _poly_trim(a)
    return a


def _poly_mulmod(a, b, m, p):
    prod = [0] * (len(a) + len(b))
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    return _poly_mod(prod, m, p)


def _monics_in_order(p, deg):
    # ordered by the base-p integer sum(c_i p^i) of the lower coefficients
    for k in range(p**deg):
        yield [(k // p**i) % p for i in range(deg)] + [1]


def is_irreducible(poly, p):
    """Trial division by every monic polynomial of degree 1..deg/2."""
    poly = _poly_trim(poly)
    deg = len(poly) - 1
    if deg < 1:
        return False
    for k in range(1, deg // 2 + 1):
        for div in _monics_in_order(p, k):
            if not _poly_mod(poly, div, p):
                return False
    return True


class FiniteField:
    """GF(p^d) with elements indexed 0..q-1 as described in the module docstring.

    ``modulus`` is the lexicographically smallest irreducible monic of
    degree d and ``theta`` the smallest primitive element, both under the
    base-p integer order, unless given explicitly.
    """

    def __init__(self, p, d, modulus=None, theta=None):
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if d < 1:
            raise BadParameters("extension degree must be positive")
        self.p, self.d, self.q = p, d, p**d
        if modulus is None:
            modulus = next(m for m in _monics_in_order(p, d) if is_irreducible(m, p))
        elif not is_irreducible(modulus, p) or len(_poly_trim(modulus)) != d + 1:
            raise BadParameters(f"modulus {modulus} is not irreducible of degree {d}")
        self.modulus = tuple(modulus)
        q = self.q
        if theta is None:
            theta = next(a for a in range(1, q) if self._mult_order(a) == q - 1)
        elif self._mult_order(theta) != q - 1:
            raise BadParameters(f"{theta} is not a primitive element")
        self.theta = theta

        # exp/log tables; index q-1 of log is unused
        exp = np.zeros(q - 1, dtype=np.int64)
        x = [1]
        t = self.to_vector(theta)
        for k in range(q - 1):
            exp[k] = self._from_poly(x)
            x = _poly_mulmod(x, t, self.modulus, p)
        log = np.full(q, -1, dtype=np.int64)
        log[exp] = np.arange(q - 1)
        self._exp, self._log = exp, log

        digits = np.array([self.to_vector(a) for a in range(q)], dtype=np.int64).reshape(q, d)
        self._digits = digits
        weights = p ** np.arange(d)
        self.add_table = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
        self.neg_table = ((-digits) % p) @ weights
        la = log[:, None] + log[None, :]
        mul = exp[la % (q - 1)]
        mul[0, :] = 0
        mul[:, 0] = 0
        self.mul_table = mul
        for tab in (self.add_table, self.neg_table, self.mul_table):
            tab.setflags(write=False)

    def __repr__(self):
        return f"FiniteField(p={self.p}, d={self.d})"

    # -- element conversions ------------------------------------------------

    def to_vector(self, a):
        return [(a // self.p**i) % self.p for i in range(self.d)]

    def from_vector(self, v):
        return int(sum((int(c) % self.p) * self.p**i for i, c in enumerate(v)))

    def _from_poly(self, poly):
        return self.from_vector(list(poly) + [0] * (self.d - len(poly)))

    def _pow_poly(self, a, e):
        result = [1]
        base = self.to_vector(a)
        while e:
            if e & 1:
                result = _poly_mulmod(result, base, self.modulus, self.p)
            base = _poly_mulmod(base, base, self.modulus, self.p)
            e >>= 1
        return self._from_poly(result)

    def _mult_order(self, a):
        if a == 0:
            return 0
        m = self.q - 1
        order = m
        for r in _prime_factors(m):
            while order % r == 0 and self._pow_poly(a, order // r) == 1:
                order //= r
        return order

    # -- arithmetic -----------------------------------------------------------

    def add(self, a, b):
        return int(self.add_table[a, b])

    def neg(self, a):
        return int(self.neg_table[a])

    def mul(self, a, b):
        return int(self.mul_table[a, b])

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return int(self._exp[(-self._log[a]) % (self.q - 1)])

    def power(self, a, e):
        if a == 0:
            return 0 if e > 0 else 1
        return int(self._exp[(self._log[a] * e) % (self.q - 1)])

    def multiplicative_order(self, a):
        return self._mult_order(a)

    def frobenius(self, a):
        return self.power(a, self.p)

    def mult_matrix(self, a):
        """Matrix over GF(p) of x -> a*x in the basis 1, x, ..., x^(d-1)."""
        cols = [self.to_vector(self.mul(a, self.p**j)) for j in range(self.d)]
        return np.array(cols, dtype=np.int64).T

    def frobenius_matrix(self):
        cols = [self.to_vector(self.frobenius(self.p**j)) for j in range(self.d)]
        return np.array(cols, dtype=np.int64).T


def gf(p, d):
    return FiniteField(p, d)


# -- permutation groups -------------------------------------------------------

def _translations(p, d):
    q = p**d
    idx = np.arange(q)
    digits = (idx[:, None] // p ** np.arange(d)) % p
    weights = p ** np.arange(d)
    out = []
    for i in range(d):
        shifted = digits.copy()
        shifted[:, i] = (shifted[:, i] + 1) % p
        out.append(Permutation(shifted @ weights))
    return out


def agl1(field):
    """AGL(1,q): x -> a*x + b on the q field elements."""
    gens = _translations(field.p, field.d)
    gens.append(Permutation(field.mul_table[field.theta]))
    G = PermGroup(gens, field.q, name=f"AGL(1,{field.q})")
    return G


def agammal1(p, d):
    """AGammaL(1,p^d): translations, x -> theta*x and x -> x^p."""
    F = FiniteField(p, d)
    gens = _translations(p, d)
    gens.append(Permutation(F.mul_table[F.theta]))
    if d > 1:
        gens.append(Permutation([F.frobenius(a) for a in range(F.q)]))
    return PermGroup(gens, F.q, name=f"AGammaL(1,{F.q})")


def as0(p, d):
    """The Passman group AS0(p^d) on V = GF(p^(d/2))^2.

    The vector (u, v) is point ``u + q*v`` with q = p^(d/2).  The point
    stabilizer is generated by diag(theta, theta^-1), diag(-1, 1) and the
    coordinate swap.
    """
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if p == 2 or d % 2:
        raise BadParameters("AS0(p^d) needs p odd and d even")
    F = FiniteField(p, d // 2)
    q = F.q
    u = np.arange(q * q) % q
    v = np.arange(q * q) // q
    gens = [Permutation(F.add_table[u, a] + q * v) for a in (p**i for i in range(d // 2))]
    gens += [Permutation(u + q * F.add_table[v, a]) for a in (p**i for i in range(d // 2))]
    t, ti = F.theta, F.inv(F.theta)
    gens.append(Permutation(F.mul_table[t, u] + q * F.mul_table[ti, v]))
    gens.append(Permutation(F.neg_table[u] + q * v))
    gens.append(Permutation(v + q * u))
    return PermGroup(gens, q * q, name=f"AS0({p}^{d})")


def _det_mod_p(M, p):
    M = [[int(x) % p for x in row] for row in M]
    n = len(M)
    det = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c]), None)
        if piv is None:
            return 0
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det = det * M[c][c] % p
        inv = pow(M[c][c], p - 2, p)
        for r in range(c + 1, n):
            f = M[r][c] * inv % p
            if f:
                M[r] = [(x - f * y) % p for x, y in zip(M[r], M[c])]
    return det % p


def affine_group(p, m, matrices, *, name=None):
    """V x| H on V = GF(p)^m for H generated by the given m x m matrices.

    Vectors act as columns (v -> M v) and are indexed base p, first
    coordinate least significant.
    """
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    q = p**m
    idx = np.arange(q)
    vecs = (idx[:, None] // p ** np.arange(m)) % p
    weights = p ** np.arange(m)
    gens = _translations(p, m)
    for M in matrices:
        M = np.atleast_2d(np.asarray(M, dtype=np.int64)) % p
        if M.shape != (m, m):
            raise ValueError(f"matrix shape {M.shape} does not match dimension {m}")
        if _det_mod_p(M, p) == 0:
            raise SingularMatrix(f"matrix {M.tolist()} is singular mod {p}")
        gens.append(Permutation(((vecs @ M.T) % p) @ weights))
    return PermGroup(gens, q, name=name)


def dihedral(p):
    """D_p acting on Z_p as x -> +-x + b."""
    return affine_group(p, 1, [[[p - 1]]], name=f"D{p}")


def corpus():
    """Named 3/2-transitive groups of degree at most 25 used for validation."""
    F9, F16, F25 = gf(3, 2), gf(2, 4), gf(5, 2)
    omega4 = gf(2, 2).mult_matrix(gf(2, 2).theta)
    block = np.zeros((4, 4), dtype=np.int64)
    block[:2, :2] = omega4
    block[2:, 2:] = omega4
    groups = {
        "D5": dihedral(5),
        "D7": dihedral(7),
        "D11": dihedral(11),
        "D13": dihedral(13),
        "F21": affine_group(7, 1, [[[2]]], name="Z7:Z3"),
        "F55": affine_group(11, 1, [[[3]]], name="Z11:Z5"),
        "F39": affine_group(13, 1, [[[3]]], name="Z13:Z3"),
        "F52": affine_group(13, 1, [[[5]]], name="Z13:Z4"),
        "F78": affine_group(13, 1, [[[4]]], name="Z13:Z6"),
        "Frob9": affine_group(3, 2, [-np.eye(2, dtype=np.int64)], name="(Z3xZ3):<-I>"),
        "Frob16": affine_group(2, 4, [block], name="Z2^4:Z3 (GF(4)-scalars)"),
        "Frob25a": affine_group(5, 2, [-np.eye(2, dtype=np.int64)], name="(Z5xZ5):<-I>"),
        "Frob25b": affine_group(5, 2, [2 * np.eye(2, dtype=np.int64)], name="(Z5xZ5):<2I>"),
        "AS0(9)": as0(3, 2),
        "AGammaL9_36": affine_group(3, 2, [F9.mult_matrix(F9.power(F9.theta, 2))],
                                    name="9:4"),
        "AGammaL9_72": affine_group(3, 2, [F9.mult_matrix(F9.power(F9.theta, 2)),
                                           F9.frobenius_matrix()], name="9:(4:2)"),
        "AGL(1,5)": agl1(gf(5, 1)),
        "AGL(1,7)": agl1(gf(7, 1)),
        "AGL(1,8)": agl1(gf(2, 3)),
        "AGL(1,9)": agl1(F9),
        "Z2^3:Z7": affine_group(2, 3, [[[0, 0, 1], [1, 0, 0], [0, 1, 1]]], name="Z2^3:Z7"),
        "AGammaL(1,8)": agammal1(2, 3),
        "Cyc16_3": affine_group(2, 4, [F16.mult_matrix(F16.power(F16.theta, 3))], name="16:5"),
        "AS0(25)": as0(5, 2),
        "Paley25": affine_group(5, 2, [F25.mult_matrix(F25.power(F25.theta, 2))], name="25:12"),
        "Cyc25_3": affine_group(5, 2, [F25.mult_matrix(F25.power(F25.theta, 3))], name="25:8"),
    }
    return groups


def paley_group(p, d):
    """V x| (nonzero squares) on GF(p^d), q odd: a uniprimitive subgroup of AGammaL(1,q)."""
    F = FiniteField(p, d)
    if F.q % 2 == 0:
        raise BadParameters("need odd q")
    return affine_group(p, d, [F.mult_matrix(F.power(F.theta, 2))], name=f"{F.q}:{(F.q - 1) // 2}")
