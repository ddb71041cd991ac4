"""Slow, independent reference implementations used to cross-check the package."""

import itertools

import numpy as np


def digits(a: int, p: int, e: int) -> list[int]:
    return [(a // p**k) % p for k in range(e)]


def undigits(ds, p: int) -> int:
    return sum(int(c) * p**k for k, c in enumerate(ds))


def poly_mulmod(a, b, modulus, p):
    """Schoolbook product of coefficient lists reduced by a monic modulus."""
    e = len(modulus) - 1
    prod = [0] * (2 * e)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    for k in range(len(prod) - 1, e - 1, -1):
        c = prod[k]
        if c:
            for t in range(e + 1):
                prod[k - e + t] = (prod[k - e + t] - c * modulus[t]) % p
    return prod[:e]


def mul(a: int, b: int, p: int, e: int, modulus) -> int:
    return undigits(poly_mulmod(digits(a, p, e), digits(b, p, e), modulus, p), p)


def add(a: int, b: int, p: int, e: int) -> int:
    return undigits([(x + y) % p for x, y in zip(digits(a, p, e), digits(b, p, e))], p)


def power(a: int, n: int, p: int, e: int, modulus) -> int:
    out = 1
    for _ in range(n):
        out = mul(out, a, p, e, modulus)
    return out


def trace(a: int, p: int, e: int, modulus) -> int:
    """Tr(a) = a + a^p + ... + a^(p^(e-1)), returned as an element of F_p."""
    out = 0
    for k in range(e):
        out = add(out, power(a, p**k, p, e, modulus), p, e)
    assert out < p, "trace must land in the prime field"
    return out


def is_square(a: int, p: int, e: int, modulus) -> bool:
    q = p**e
    return any(mul(x, x, p, e, modulus) == a for x in range(q))


def naive_inverse_fourier(values, p, e, d, modulus):
    """f^v(m) = q^-d sum_x chi(m.x) f(x) by direct summation."""
    q = p**e
    pts = list(itertools.product(range(q), repeat=d))
    index = [sum(c * q**i for i, c in enumerate(pt)) for pt in pts]
    tr = [trace(a, p, e, modulus) for a in range(q)]
    mult = [[mul(a, b, p, e, modulus) for b in range(q)] for a in range(q)]
    out = np.zeros(q**d, dtype=complex)
    for m, mi in zip(pts, index):
        total = 0j
        for x, xi in zip(pts, index):
            s = 0
            for a, b in zip(m, x):
                s = add(s, mult[a][b], p, e)
            total += np.exp(2j * np.pi * tr[s] / p) * values[xi]
        out[mi] = total / q**d
    return out


def naive_cone_size(p, e, d, modulus) -> int:
    q = p**e
    sq = [mul(a, a, p, e, modulus) for a in range(q)]
    neg = [undigits([(-c) % p for c in digits(a, p, e)], p) for a in range(q)]
    count = 0
    for x in itertools.product(range(q), repeat=d):
        s = 0
        for c in x[:-2]:
            s = add(s, sq[c], p, e)
        s = add(s, neg[mul(x[-2], x[-1], p, e, modulus)], p, e)
        count += s == 0
    return count


def cone_size_formula(q: int, d: int, eta_minus_one: int) -> int:
    """Zeros of a hyperbolic plane plus d-2 squares."""
    if d % 2:
        return q ** (d - 1)
    nu = eta_minus_one ** ((d - 2) // 2)
    return q ** (d - 1) + nu * (q - 1) * q ** ((d - 2) // 2)
