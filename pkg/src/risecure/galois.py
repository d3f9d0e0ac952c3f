"""Arithmetic over GF(2^m) plus the decoder primitives shared by both codecs.

The field is represented through exp/log tables built from a primitive
polynomial. Scalar helpers operate on plain ints (fast enough for the
Berlekamp-Massey inner loop); the vector helpers take numpy uint8/int arrays
and are what the syndrome and Chien-search hot paths use.

Polynomials over the field are numpy int arrays in ascending order, so
``poly[i]`` is the coefficient of x^i.
"""

import numpy as np


class GF2m:
    """GF(2^m) defined by a primitive polynomial given as a bitmask."""

    def __init__(self, m: int, primitive_poly: int):
        self.m = m
        self.order = 1 << m
        self.primitive_poly = primitive_poly
        n = self.order - 1
        exp = [0] * (2 * n)
        log = [0] * self.order
        x = 1
        for i in range(n):
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & self.order:
                x ^= primitive_poly
            if x == 1 and i != n - 1:  # catches irreducible but non-primitive polys
                raise ValueError(f"0x{primitive_poly:x} is not primitive for m={m}")
        if x != 1:
            raise ValueError(f"0x{primitive_poly:x} is not primitive for m={m}")
        for i in range(n, 2 * n):
            exp[i] = exp[i - n]
        self.exp = exp
        self.log = log
        # numpy copies for the vectorized paths
        self.exp_np = np.array(exp, dtype=np.int64)
        self.log_np = np.array(log, dtype=np.int64)

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp[self.log[a] + self.log[b]]

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ZeroDivisionError("division by zero in GF(2^m)")
        if a == 0:
            return 0
        return self.exp[self.log[a] - self.log[b] + self.order - 1]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return self.exp[self.order - 1 - self.log[a]]

    def pow_alpha(self, e: int) -> int:
        """alpha**e for any integer exponent."""
        return self.exp[e % (self.order - 1)]

    def mul_vec(self, a, b):
        """Elementwise product over the field, broadcasting scalars."""
        a, b = np.broadcast_arrays(
            np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        )
        out = np.zeros(a.shape, dtype=np.int64)
        nz = (a != 0) & (b != 0)
        if nz.any():
            out[nz] = self.exp_np[self.log_np[a[nz]] + self.log_np[b[nz]]]
        return out

    # polynomial helpers (ascending coefficient arrays over this field)

    def poly_mul(self, p, q):
        p = np.asarray(p, dtype=np.int64)
        q = np.asarray(q, dtype=np.int64)
        out = np.zeros(len(p) + len(q) - 1, dtype=np.int64)
        for i, c in enumerate(p):
            if c:
                out[i : i + len(q)] ^= self.mul_vec(np.int64(c), q)
        return out

    def poly_eval(self, p, x: int) -> int:
        """Evaluate p at the scalar point x (Horner, descending from the top)."""
        acc = 0
        for c in reversed(np.asarray(p, dtype=np.int64)):
            acc = self.mul(acc, x) ^ int(c)
        return acc

    def poly_eval_many(self, p, xs):
        """Evaluate p at every point of the array xs."""
        xs = np.asarray(xs, dtype=np.int64)
        acc = np.zeros_like(xs)
        for c in reversed(np.asarray(p, dtype=np.int64)):
            acc = self.mul_vec(acc, xs) ^ int(c)
        return acc


def berlekamp_massey(field: GF2m, syndromes):
    """Find the shortest LFSR (error locator) generating the syndrome sequence.

    Returns the connection polynomial Lambda as an ascending int array with
    Lambda[0] == 1, and its LFSR length L. Works for any 2t-long syndrome
    sequence over the field; binary BCH callers simply pass GF(2^m)
    syndromes like everyone else.
    """
    s = [int(v) for v in syndromes]
    n = len(s)
    lam = [1] + [0] * n
    prev = [1] + [0] * n
    l = 0
    shift = 1
    b = 1  # last nonzero discrepancy
    for r in range(n):
        d = s[r]
        for i in range(1, l + 1):
            d ^= field.mul(lam[i], s[r - i])
        if d == 0:
            shift += 1
        elif 2 * l <= r:
            tmp = lam[:]
            coef = field.div(d, b)
            for i in range(0, n + 1 - shift):
                lam[i + shift] ^= field.mul(coef, prev[i])
            l = r + 1 - l
            prev = tmp
            b = d
            shift = 1
        else:
            coef = field.div(d, b)
            for i in range(0, n + 1 - shift):
                lam[i + shift] ^= field.mul(coef, prev[i])
            shift += 1
    deg = max(i for i, c in enumerate(lam) if c)
    return np.array(lam[: deg + 1], dtype=np.int64), l


def locator_roots(field: GF2m, lam, n: int):
    """Chien search: error positions i in [0, n) with Lambda(alpha^-i) == 0.

    Returns (positions, root_count). root_count counts distinct roots of
    Lambda over the whole multiplicative group, which the decoders compare
    against deg(Lambda) to reject bogus locators.
    """
    points = field.exp_np[: field.order - 1]  # alpha^0 .. alpha^(q-2)
    vals = field.poly_eval_many(lam, points)
    root_exps = np.nonzero(vals == 0)[0]  # exponents j with Lambda(alpha^j)=0
    # alpha^j root  <->  position i = -j mod (q-1)
    pos = (-(root_exps) % (field.order - 1)).astype(np.int64)
    pos = pos[pos < n]
    return np.sort(pos), int(len(root_exps))
