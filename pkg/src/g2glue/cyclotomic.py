"""Exact arithmetic in the cyclotomic field Q(zeta_N).

Elements are coordinate vectors over the power basis 1, z, ..., z^(phi(N)-1)
reduced modulo the N-th cyclotomic polynomial.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from math import gcd

from . import exact


def _polydiv_exact(num: list[int], den: list[int]) -> list[int]:
    # coefficient lists, lowest degree first; den monic
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        out[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    if any(num[: len(den) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            poly = _polydiv_exact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[Fraction, ...], ...]:
    """Reduced coordinates of z^k for k = 0 .. n-1."""
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    rows = []
    cur = [Fraction(0)] * deg
    cur[0] = Fraction(1)
    for _ in range(n):
        rows.append(tuple(cur))
        # multiply by z
        top = cur[-1]
        cur = [Fraction(0)] + cur[:-1]
        if top:
            cur = [c - top * p for c, p in zip(cur, phi[:-1])]
    return tuple(rows)


class Cyclotomic:
    __slots__ = ("level", "coords")

    def __init__(self, level: int, coords):
        self.level = level
        self.coords = tuple(Fraction(c) for c in coords)

    # -- constructors
    @classmethod
    def degree(cls, level: int) -> int:
        return len(cyclotomic_polynomial(level)) - 1

    @classmethod
    def rational(cls, level: int, q) -> "Cyclotomic":
        c = [Fraction(0)] * cls.degree(level)
        c[0] = exact.frac(q)
        return cls(level, c)

    @classmethod
    def zeta(cls, level: int, k: int = 1) -> "Cyclotomic":
        return cls(level, _power_table(level)[k % level])

    @classmethod
    def cos2pi(cls, level: int, k: int) -> "Cyclotomic":
        """cos(2 pi k / level) as (z^k + z^-k) / 2."""
        return (cls.zeta(level, k) + cls.zeta(level, -k)) * Fraction(1, 2)

    def lift(self, level: int) -> "Cyclotomic":
        """Embed into Q(zeta_level) for a multiple ``level`` of self.level."""
        if level % self.level:
            raise ValueError(f"cannot embed level {self.level} into {level}")
        step = level // self.level
        acc = Cyclotomic.rational(level, 0)
        for k, c in enumerate(self.coords):
            if c:
                acc = acc + Cyclotomic.zeta(level, k * step) * c
        return acc

    def _coerce(self, other) -> "Cyclotomic":
        if isinstance(other, Cyclotomic):
            if other.level != self.level:
                raise ValueError("level mismatch; lift first")
            return other
        return Cyclotomic.rational(self.level, other)

    # -- arithmetic
    def __add__(self, other):
        o = self._coerce(other)
        return Cyclotomic(self.level, [a + b for a, b in zip(self.coords, o.coords)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.level, [-a for a in self.coords])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Cyclotomic):
            q = exact.frac(other)
            return Cyclotomic(self.level, [a * q for a in self.coords])
        o = self._coerce(other)
        table = _power_table(self.level)
        deg = len(self.coords)
        acc = [Fraction(0)] * deg
        for i, a in enumerate(self.coords):
            if not a:
                continue
            for j, b in enumerate(o.coords):
                if b:
                    row = table[(i + j) % self.level] if i + j >= deg else None
                    if row is None:
                        acc[i + j] += a * b
                    else:
                        ab = a * b
                        for k, r in enumerate(row):
                            if r:
                                acc[k] += ab * r
        return Cyclotomic(self.level, acc)

    __rmul__ = __mul__

    def multiplication_matrix(self) -> list[list[Fraction]]:
        deg = len(self.coords)
        cols = [(self * Cyclotomic(self.level, [int(i == j) for i in range(deg)])).coords for j in range(deg)]
        return exact.transpose(cols)

    def inverse(self) -> "Cyclotomic":
        if self.is_zero():
            raise ZeroDivisionError("zero in Q(zeta)")
        deg = len(self.coords)
        e0 = [Fraction(int(i == 0)) for i in range(deg)]
        sol = exact.solve(self.multiplication_matrix(), e0)
        return Cyclotomic(self.level, sol)

    def __truediv__(self, other):
        if not isinstance(other, Cyclotomic):
            return self * (1 / exact.frac(other))
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = Cyclotomic.rational(self.level, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def galois(self, a: int) -> "Cyclotomic":
        """Image under z -> z^a (a coprime to the level)."""
        if gcd(a, self.level) != 1:
            raise ValueError("Galois exponent must be a unit")
        acc = Cyclotomic.rational(self.level, 0)
        for k, c in enumerate(self.coords):
            if c:
                acc = acc + Cyclotomic.zeta(self.level, a * k) * c
        return acc

    def conjugate(self) -> "Cyclotomic":
        return self.galois(-1)

    # -- predicates
    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coords[0]

    def __complex__(self) -> complex:
        z = cmath.exp(2j * cmath.pi / self.level)
        return sum(float(c) * z**k for k, c in enumerate(self.coords))

    def __eq__(self, other):
        if isinstance(other, Cyclotomic):
            if other.level != self.level:
                return False
            return self.coords == other.coords
        try:
            return self == Cyclotomic.rational(self.level, other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.level, self.coords))

    def __repr__(self):
        terms = [f"{c}*z^{k}" if k else str(c) for k, c in enumerate(self.coords) if c]
        return f"Cyclotomic[{self.level}]({' + '.join(terms) or '0'})"

    def to_json(self):
        if self.is_rational():
            return str(self.coords[0])
        return {"level": self.level, "coords": [str(c) for c in self.coords]}
