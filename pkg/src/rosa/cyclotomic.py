"""Exact arithmetic in the cyclotomic field Q(zeta_n).

Elements are coefficient tuples in the power basis 1, zeta, ..., zeta^(d-1)
with d = phi(n), reduced modulo the n-th cyclotomic polynomial.  Rationals are
exactly the elements whose non-constant coefficients vanish.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

Poly = list  # coefficients, lowest degree first


def _trim(p: Poly) -> Poly:
    while p and p[-1] == 0:
        p.pop()
    return p


def _divmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    a = [Fraction(x) for x in a]
    b = _trim([Fraction(x) for x in b])
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(_trim(a)) >= len(b):
        shift = len(a) - len(b)
        c = a[-1] / b[-1]
        q[shift] = c
        for i, bi in enumerate(b):
            a[i + shift] -= c * bi
    return _trim(q), a


def _mul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _sub(a: Poly, b: Poly) -> Poly:
    m = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(m)])


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    if n < 1:
        raise ValueError("n must be positive")
    p: Poly = [Fraction(-1)] + [Fraction(0)] * (n - 1) + [Fraction(1)]
    for d in range(1, n):
        if n % d == 0:
            p, r = _divmod(p, list(cyclotomic_polynomial(d)))
            assert not _trim(r)
    return tuple(int(c) for c in p)


class CyclotomicField:
    def __init__(self, n: int):
        self.n = n
        self.modulus = [Fraction(c) for c in cyclotomic_polynomial(n)]
        self.degree = len(self.modulus) - 1

    def element(self, coeffs: Sequence) -> tuple[Fraction, ...]:
        _, r = _divmod(list(coeffs), self.modulus)
        r = r + [Fraction(0)] * (self.degree - len(r))
        return tuple(r[: self.degree])

    def rational(self, q) -> tuple[Fraction, ...]:
        return self.element([Fraction(q)])

    def zeta(self, k: int = 1) -> tuple[Fraction, ...]:
        k %= self.n
        return self.element([0] * k + [1])

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple(x - y for x, y in zip(a, b))

    def scale(self, a, q):
        q = Fraction(q)
        return tuple(x * q for x in a)

    def mul(self, a, b):
        return self.element(_mul(list(a), list(b)))

    def inv(self, a):
        """Inverse by the extended Euclidean algorithm against Phi_n."""
        r0, r1 = list(self.modulus), _trim(list(a))
        if not r1:
            raise ZeroDivisionError("zero has no inverse")
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, r = _divmod(r0, r1)
            r0, r1 = r1, _trim(r)
            s0, s1 = s1, _sub(s0, _mul(q, s1))
        # r1 is a non-zero constant
        return self.element([c / r1[0] for c in s1])

    def conj(self, a):
        """Complex conjugation, zeta -> zeta^-1."""
        out = self.rational(0)
        for k, c in enumerate(a):
            if c:
                out = self.add(out, self.scale(self.zeta(-k), c))
        return out

    def is_rational(self, a) -> bool:
        return all(c == 0 for c in a[1:])

    def is_integer(self, a) -> bool:
        return self.is_rational(a) and a[0].denominator == 1

    def to_complex(self, a) -> complex:
        w = cmath.exp(2j * cmath.pi / self.n)
        return complex(sum(float(c) * w**k for k, c in enumerate(a)))
