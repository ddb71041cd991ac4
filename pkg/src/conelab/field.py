"""Arithmetic in odd prime-power fields F_q and vectors over them.

Elements are dense integer indices in ``[0, q)``: the index of the residue
polynomial ``c_0 + c_1 x + ... + c_{e-1} x^{e-1}`` is ``sum(c_k * p**k)``.
Index 0 is zero and index 1 is one.  Multiplication goes through discrete
log / antilog tables, so building a field costs ``O(q e^2)`` and every
operation below is a table lookup that vectorizes over numpy arrays.

Points of F_q^d are encoded base-q, little-endian in the coordinates:
``(x_1, ..., x_d) -> x_1 + x_2 q + ... + x_d q^{d-1}``.
"""

from __future__ import annotations

import itertools
from functools import cached_property, lru_cache

import numpy as np

from conelab.exceptions import (
    DegreeZeroError,
    DimensionTooSmallError,
    EvenCharacteristicError,
    FieldDivisionByZero,
    NonPrimeError,
    OverflowLimitError,
)

#: Largest number of points of F_q^d that the dense code paths accept.
MAX_POINTS = 1 << 23


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def prime_power_decompose(q: int) -> tuple[int, int]:
    """Return ``(p, e)`` with ``q == p**e``; raise NonPrimeError otherwise."""
    if q < 2:
        raise NonPrimeError(f"{q} is not a prime power")
    p = next(k for k in range(2, q + 1) if q % k == 0)
    e, r = 0, q
    while r % p == 0:
        r //= p
        e += 1
    if r != 1:
        raise NonPrimeError(f"{q} is not a prime power")
    return p, e


# --- polynomial helpers over F_p (coefficient lists, low degree first) ---

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mod(a, m, p):
    """Remainder of ``a`` modulo the monic polynomial ``m`` over F_p."""
    a = [c % p for c in a]
    dm = len(m) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i]
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * m[j]) % p
    return _trim(a[:dm])


def poly_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def is_irreducible(m, p) -> bool:
    """Trial division of the monic polynomial ``m`` by every monic factor."""
    e = len(m) - 1
    if e <= 1:
        return e == 1
    for deg in range(1, e // 2 + 1):
        for low in itertools.product(range(p), repeat=deg):
            if not poly_mod(m, list(low) + [1], p):
                return False
    return True


def smallest_irreducible(p: int, e: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree ``e``.

    Coefficients are compared low degree first, so for ``(3, 2)`` the
    candidates run ``x^2, x^2+x, x^2+2x, x^2+1, ...`` and ``x^2+1`` wins.
    """
    for low in itertools.product(range(p), repeat=e):
        m = list(low) + [1]
        if is_irreducible(m, p):
            return tuple(m)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


def _prime_factors(n: int) -> list[int]:
    out, k = [], 2
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            while n % k == 0:
                n //= k
        k += 1
    if n > 1:
        out.append(n)
    return out


class GF:
    """The finite field F_{p^e} for an odd prime ``p``.

    Instances are immutable and cached by :func:`field_make`; share them
    freely.  Scalar arguments may be Python ints or integer numpy arrays.
    """

    def __init__(self, p: int, e: int = 1):
        if not is_prime(p):
            raise NonPrimeError(f"p={p} is not prime")
        if p == 2:
            raise EvenCharacteristicError("characteristic 2 is not supported")
        if e < 1:
            raise DegreeZeroError(f"extension degree must be >= 1, got {e}")
        self.p = p
        self.e = e
        self.q = p**e
        self.modulus = smallest_irreducible(p, e)

        q = self.q
        idx = np.arange(q)
        self.digits = np.stack([(idx // p**k) % p for k in range(e)], axis=1)
        self._weights = p ** np.arange(e)
        self.neg_table = self._encode((-self.digits) % p)

        self.generator, self.exp_table = self._find_generator()
        log = np.zeros(q, dtype=np.int64)
        log[self.exp_table[: q - 1]] = np.arange(q - 1)
        self.log_table = log

        nz = idx[1:]
        inv = np.zeros(q, dtype=np.int64)
        inv[nz] = self.exp_table[(-log[nz]) % (q - 1)]
        self.inv_table = inv

        eta = np.zeros(q, dtype=np.int64)
        eta[nz] = np.where(log[nz] % 2 == 0, 1, -1)
        self.eta_table = eta

        tr = np.zeros(q, dtype=np.int64)
        for k in range(e):
            powk = np.zeros(q, dtype=np.int64)
            powk[nz] = self.exp_table[(log[nz] * p**k) % (q - 1)]
            tr = self.add(tr, powk)
        self.trace_table = tr
        self.square_table = self.mul(idx, idx)

        for t in (self.digits, self.neg_table, self.exp_table, self.log_table,
                  self.inv_table, self.eta_table, self.trace_table, self.square_table):
            t.setflags(write=False)

    def __repr__(self):
        return f"GF({self.p}**{self.e})"

    def __reduce__(self):
        return field_make, (self.p, self.e)

    # --- encoding ---

    def _encode(self, digits) -> np.ndarray:
        return np.asarray(digits, dtype=np.int64) @ self._weights

    def element(self, coeffs) -> int:
        """Index of the residue class with coefficient list ``coeffs``."""
        c = list(coeffs) + [0] * (self.e - len(coeffs))
        return int(self._encode(np.asarray(c[: self.e]) % self.p))

    def _poly(self, a: int) -> list[int]:
        return _trim(self.digits[a].tolist())

    def _find_generator(self):
        q, p, m = self.q, self.p, list(self.modulus)
        factors = _prime_factors(q - 1)

        def power(a, n):
            result, base = [1], a
            while n:
                if n & 1:
                    result = poly_mod(poly_mul(result, base, p), m, p)
                base = poly_mod(poly_mul(base, base, p), m, p)
                n >>= 1
            return result

        for g in range(2, q):
            ga = self._poly(g)
            if all(power(ga, (q - 1) // f) != [1] for f in factors):
                break
        else:  # pragma: no cover
            raise AssertionError("no primitive element")
        # Multiplication by g is F_p-linear; iterate its matrix.
        cols = []
        for k in range(self.e):
            unit = [0] * k + [1]
            prod = poly_mod(poly_mul(unit, ga, p), m, p)
            cols.append(prod + [0] * (self.e - len(prod)))
        mat = np.array(cols, dtype=np.int64).T
        vec = np.zeros(self.e, dtype=np.int64)
        vec[0] = 1
        out = np.empty(q, dtype=np.int64)
        for i in range(q):
            out[i] = vec @ self._weights
            vec = (mat @ vec) % p
        return g, out

    # --- arithmetic ---

    def add(self, a, b):
        da, db = self.digits[a], self.digits[b]
        return self._encode((da + db) % self.p)

    def sub(self, a, b):
        return self.add(a, self.neg_table[b])

    def neg(self, a):
        return self.neg_table[a]

    def mul(self, a, b):
        a = np.asarray(a)
        b = np.asarray(b)
        la, lb = self.log_table[a], self.log_table[b]
        out = self.exp_table[(la + lb) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def inv(self, a):
        a = np.asarray(a)
        if np.any(a == 0):
            raise FieldDivisionByZero("inverse of zero")
        return self.inv_table[a]

    def arith(self, op: str, a, b=None):
        """Dispatch ``add``, ``sub``, ``mul``, ``neg`` or ``inv`` and return ints."""
        if op in ("neg", "inv"):
            out = getattr(self, op)(a)
        else:
            out = getattr(self, op)(a, b)
        return int(out) if np.ndim(out) == 0 else out

    def eta(self, a):
        """Quadratic character, extended by ``eta(0) = 0``."""
        out = self.eta_table[a]
        return int(out) if np.ndim(out) == 0 else out

    def trace(self, a):
        out = self.trace_table[a]
        return int(out) if np.ndim(out) == 0 else out

    def sqrt(self, a: int) -> int | None:
        """Some square root of ``a``, or None when ``a`` is a nonsquare."""
        if a == 0:
            return 0
        la = int(self.log_table[a])
        if la % 2:
            return None
        return int(self.exp_table[la // 2])

    @cached_property
    def add_table(self) -> np.ndarray:
        idx = np.arange(self.q)
        t = self.add(idx[:, None], idx[None, :])
        t.setflags(write=False)
        return t

    @cached_property
    def mul_table(self) -> np.ndarray:
        idx = np.arange(self.q)
        t = self.mul(idx[:, None], idx[None, :])
        t.setflags(write=False)
        return t

    @cached_property
    def trace_form(self) -> np.ndarray:
        """Matrix ``T[k, l] = Tr(x^k x^l)`` of the trace pairing on F_p^e."""
        basis = self.p ** np.arange(self.e)
        t = self.trace_table[self.mul(basis[:, None], basis[None, :])]
        t.setflags(write=False)
        return t


@lru_cache(maxsize=None)
def field_make(p: int, e: int = 1) -> GF:
    return GF(p, e)


def field_from_q(q: int) -> GF:
    return field_make(*prime_power_decompose(q))


# --- vectors over F_q ---

def check_points(field: GF, d: int, limit: int = MAX_POINTS) -> int:
    n = field.q**d
    if n > limit:
        raise OverflowLimitError(f"q^d = {field.q}^{d} = {n} exceeds limit {limit}")
    return n


def encode_point(field: GF, coords) -> int:
    out = 0
    for c in reversed(list(coords)):
        out = out * field.q + int(c)
    return out


def decode_point(field: GF, d: int, index: int) -> tuple[int, ...]:
    out = []
    for _ in range(d):
        index, c = divmod(index, field.q)
        out.append(c)
    return tuple(out)


@lru_cache(maxsize=32)
def point_coords(field: GF, d: int) -> np.ndarray:
    """All points of F_q^d as a ``(q^d, d)`` array of element indices."""
    n = check_points(field, d)
    idx = np.arange(n, dtype=np.int64)
    out = np.stack([(idx // field.q**i) % field.q for i in range(d)], axis=1)
    out.setflags(write=False)
    return out


def encode_points(field: GF, coords) -> np.ndarray:
    coords = np.asarray(coords, dtype=np.int64)
    return coords @ (field.q ** np.arange(coords.shape[-1], dtype=np.int64))


def vec_add(field: GF, x, y):
    return field.add(np.asarray(x), np.asarray(y))


def vec_scale(field: GF, c, x):
    return field.mul(c, np.asarray(x))


def dot(field: GF, x, y):
    """F_q dot product along the last axis."""
    prods = field.mul(np.asarray(x), np.asarray(y))
    out = prods[..., 0]
    for i in range(1, prods.shape[-1]):
        out = field.add(out, prods[..., i])
    return out


def _sum_of_squares(field: GF, coords):
    sq = field.square_table[coords]
    out = sq[..., 0]
    for i in range(1, sq.shape[-1]):
        out = field.add(out, sq[..., i])
    return out


def _require_dim(d: int, least: int = 3):
    if d < least:
        raise DimensionTooSmallError(f"dimension {d} < {least}")


def cone_form(field: GF, coords):
    """``x_1^2 + ... + x_{d-2}^2 - x_{d-1} x_d`` along the last axis."""
    coords = np.asarray(coords, dtype=np.int64)
    _require_dim(coords.shape[-1])
    head = _sum_of_squares(field, coords[..., :-2])
    return field.sub(head, field.mul(coords[..., -2], coords[..., -1]))


def gamma_form(field: GF, xi):
    """The dual form ``xi_1^2 + ... + xi_{d-2}^2 - 4 xi_{d-1} xi_d``."""
    xi = np.asarray(xi, dtype=np.int64)
    _require_dim(xi.shape[-1])
    head = _sum_of_squares(field, xi[..., :-2])
    four = field.element([4 % field.p])
    tail = field.mul(four, field.mul(xi[..., -2], xi[..., -1]))
    out = field.sub(head, tail)
    return int(out) if np.ndim(out) == 0 else out


def cone_contains(field: GF, x):
    out = cone_form(field, x) == 0
    return bool(out) if np.ndim(out) == 0 else out


def bilinear(field: GF, x, y):
    """Polar form ``Q(x+y) - Q(x) - Q(y)`` of the cone form ``Q``."""
    s = cone_form(field, vec_add(field, x, y))
    return field.sub(field.sub(s, cone_form(field, x)), cone_form(field, y))
