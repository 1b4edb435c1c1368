"""Arithmetic in GF(2^m) and batched Lagrange interpolation.

Scalar ``gf_mul`` / ``gf_inv`` are the reference carry-less routines.
:class:`Field` adds exp/log tables for vectorised work in the codec; its
tables are built from the same reduction polynomial.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import ParameterDomainError

# w = 8 and w = 16 are the published codec fields; the rest serve remainder columns
POLYNOMIALS = {
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x89,
    8: 0x11B,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,
    17: 0x20009,
    18: 0x40081,
    19: 0x80027,
    20: 0x100009,
}
MAX_BITS = max(POLYNOMIALS)

# bounds temporary (targets x known) matrices in interpolate()
_CHUNK = 1 << 21


def _poly(w: int) -> int:
    try:
        return POLYNOMIALS[w]
    except KeyError:
        raise ParameterDomainError(f"no field polynomial for w={w}; supported: {sorted(POLYNOMIALS)}") from None


def clmul(x: int, y: int, w: int, poly: int) -> int:
    r = 0
    top = 1 << w
    while y:
        if y & 1:
            r ^= x
        y >>= 1
        x <<= 1
        if x & top:
            x ^= poly
    return r


def _check(x: int, w: int):
    if not 0 <= x < 1 << w:
        raise ParameterDomainError(f"{x} is not an element of GF(2^{w})")


def gf_mul(x: int, y: int, w: int = 8) -> int:
    _check(x, w)
    _check(y, w)
    return clmul(x, y, w, _poly(w))


def gf_pow(x: int, e: int, w: int = 8) -> int:
    return gf_pow_field(x, e, w, _poly(w))


def gf_inv(x: int, w: int = 8) -> int:
    _check(x, w)
    if x == 0:
        raise ZeroDivisionError("0 has no inverse in GF(2^w)")
    return gf_pow(x, (1 << w) - 2, w)


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _mul_vec_const(a: np.ndarray, y: int, w: int, poly: int) -> np.ndarray:
    r = np.zeros_like(a)
    t = a.copy()
    top = 1 << w
    while y:
        if y & 1:
            r ^= t
        y >>= 1
        t <<= 1
        t ^= np.where(t & top, poly, 0).astype(t.dtype)
    return r


class Field:
    """GF(2^w) with exp/log tables over a primitive element."""

    def __init__(self, w: int):
        self.w = w
        self.poly = _poly(w)
        self.order = 1 << w
        q1 = self.order - 1
        self.generator = self._find_generator()
        exp = np.empty(2 * q1, dtype=np.int64)
        exp[0] = 1
        n = 1
        # doubling: exp[n:2n] = exp[:n] * g^n
        while n < q1:
            m = min(n, q1 - n)
            exp[n:n + m] = _mul_vec_const(exp[:m], int(gf_pow_field(self.generator, n, w, self.poly)), w, self.poly)
            n += m
        exp[q1:] = exp[:q1]
        log = np.full(self.order, -1, dtype=np.int64)
        log[exp[:q1]] = np.arange(q1)
        if (log[1:] < 0).any():
            raise ParameterDomainError(f"polynomial {self.poly:#x} does not give a field")
        self.exp = exp
        self.log = log

    def _find_generator(self) -> int:
        q1 = self.order - 1
        factors = _prime_factors(q1)
        for g in range(2, self.order):
            if all(gf_pow_field(g, q1 // p, self.w, self.poly) != 1 for p in factors):
                if gf_pow_field(g, q1, self.w, self.poly) == 1:
                    return g
        if self.order == 2:
            return 1
        raise ParameterDomainError(f"polynomial {self.poly:#x} is reducible")

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        out = self.exp[(self.log[x] + self.log[y]) % (self.order - 1)]
        return np.where((x == 0) | (y == 0), 0, out)

    def inv(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        if (x == 0).any():
            raise ZeroDivisionError("0 has no inverse")
        return self.exp[(self.order - 1 - self.log[x]) % (self.order - 1)]

    def interpolate(self, xs: np.ndarray, ys: np.ndarray, targets: np.ndarray) -> np.ndarray:
        """Evaluate the interpolant through ``(xs, ys[:, s])`` at ``targets``.

        ``xs``: distinct points, shape (k,).  ``ys``: shape (k, S), one column
        per independent symbol position.  ``targets`` must avoid ``xs``.
        Barycentric form; cost O(k^2 + T k S).
        """
        xs = np.asarray(xs, dtype=np.int64)
        ys = np.asarray(ys, dtype=np.int64)
        targets = np.asarray(targets, dtype=np.int64)
        if ys.ndim == 1:
            return self.interpolate(xs, ys[:, None], targets)[:, 0]
        k, S = ys.shape
        T = targets.size
        out = np.zeros((T, S), dtype=np.int64)
        if T == 0:
            return out
        q1 = self.order - 1
        log = self.log
        # log of barycentric weights 1 / prod_{m != j} (x_j - x_m)
        logw = np.empty(k, dtype=np.int64)
        rows = max(1, _CHUNK // max(k, 1))
        for lo in range(0, k, rows):
            d = xs[lo:lo + rows, None] ^ xs[None, :]
            ld = log[d]
            ld[d == 0] = 0
            logw[lo:lo + rows] = (-ld.sum(axis=1)) % q1
        nz = ys != 0
        logy = np.where(nz, log[ys], 0)
        rows = max(1, _CHUNK // max(k, 1))
        for lo in range(0, T, rows):
            t = targets[lo:lo + rows]
            d = t[:, None] ^ xs[None, :]
            if (d == 0).any():
                raise ParameterDomainError("interpolation target coincides with a known point")
            ld = log[d]
            # log of L(t) w_j / (t - x_j)
            base = (ld.sum(axis=1)[:, None] - ld + logw[None, :]) % q1
            for s in range(S):
                terms = self.exp[base + logy[None, :, s]]
                terms[:, ~nz[:, s]] = 0
                out[lo:lo + rows, s] = np.bitwise_xor.reduce(terms, axis=1)
        return out


def gf_pow_field(x: int, e: int, w: int, poly: int) -> int:
    r = 1
    while e:
        if e & 1:
            r = clmul(r, x, w, poly)
        x = clmul(x, x, w, poly)
        e >>= 1
    return r


@lru_cache(maxsize=None)
def field(w: int) -> Field:
    return Field(w)
