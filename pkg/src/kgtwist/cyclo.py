"""Exact elements of cyclotomic fields Q(zeta_N).

Phases exp(2 pi i p/q) of rational angles live here, so products of
rational-angle cocycle values can be compared exactly.  An element is stored
in the power basis 1, z, ..., z^(phi(N)-1) reduced modulo the N-th cyclotomic
polynomial, which makes the representation canonical for a fixed N.
"""
from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from math import gcd

import sympy


@lru_cache(maxsize=None)
def _phi(n: int) -> tuple[int, ...]:
    """Coefficients (constant term first) of the n-th cyclotomic polynomial."""
    x = sympy.Symbol("x")
    poly = sympy.Poly(sympy.cyclotomic_poly(n, x), x)
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


def _reduce(coeffs: list, n: int) -> tuple[Fraction, ...]:
    phi = _phi(n)
    d = len(phi) - 1
    a = list(coeffs) + [Fraction(0)] * max(0, d - len(coeffs))
    for i in range(len(a) - 1, d - 1, -1):
        c = a[i]
        if c:
            base = i - d
            for j in range(d + 1):
                a[base + j] -= c * phi[j]
    return tuple(Fraction(c) for c in a[:d])


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


class Cyclotomic:
    __slots__ = ("n", "coeffs")
    __hash__ = None

    def __init__(self, n: int, coeffs):
        self.n = n
        self.coeffs = _reduce([Fraction(c) for c in coeffs], n)

    @classmethod
    def rational(cls, r) -> "Cyclotomic":
        return cls(1, [Fraction(r)])

    @classmethod
    def root(cls, angle: Fraction) -> "Cyclotomic":
        """exp(2 pi i * angle) for a rational angle."""
        angle = Fraction(angle)
        n = angle.denominator
        p = angle.numerator % n
        c = [Fraction(0)] * (p + 1)
        c[p] = Fraction(1)
        return cls(n, c)

    # -- coercions --------------------------------------------------------
    def lift(self, m: int) -> tuple[Fraction, ...]:
        if m == self.n:
            return self.coeffs
        step = m // self.n
        c = [Fraction(0)] * (step * len(self.coeffs) + 1)
        for j, a in enumerate(self.coeffs):
            c[j * step] = a
        return _reduce(c, m)

    @staticmethod
    def coerce(x) -> "Cyclotomic | None":
        if isinstance(x, Cyclotomic):
            return x
        if isinstance(x, (int, Fraction)):
            return Cyclotomic.rational(x)
        return None

    def __complex__(self) -> complex:
        z = cmath.exp(2j * cmath.pi / self.n)
        return complex(sum(float(a) * z ** j for j, a in enumerate(self.coeffs) if a))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    # -- arithmetic -------------------------------------------------------
    def _binop(self, other, op):
        o = Cyclotomic.coerce(other)
        if o is None:
            return op(complex(self), complex(other))
        m = _lcm(self.n, o.n)
        return Cyclotomic(m, [op(a, b) for a, b in zip(self.lift(m), o.lift(m))])

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Cyclotomic(self.n, [-a for a in self.coeffs])

    def __mul__(self, other):
        o = Cyclotomic.coerce(other)
        if o is None:
            return complex(self) * other
        m = _lcm(self.n, o.n)
        x, y = self.lift(m), o.lift(m)
        prod = [Fraction(0)] * max(1, len(x) + len(y) - 1)
        for i, a in enumerate(x):
            if a:
                for j, b in enumerate(y):
                    if b:
                        prod[i + j] += a * b
        return Cyclotomic(m, prod)

    __rmul__ = __mul__

    def conjugate(self) -> "Cyclotomic":
        c = [Fraction(0)] * (self.n + 1)
        for j, a in enumerate(self.coeffs):
            c[(-j) % self.n] += a
        return Cyclotomic(self.n, c)

    def __eq__(self, other):
        o = Cyclotomic.coerce(other)
        if o is None:
            try:
                return complex(self) == complex(other)
            except TypeError:
                return NotImplemented
        m = _lcm(self.n, o.n)
        return self.lift(m) == o.lift(m)

    def __repr__(self) -> str:
        terms = [f"{a}*z{self.n}^{j}" for j, a in enumerate(self.coeffs) if a]
        return "Cyclotomic(" + (" + ".join(terms) or "0") + ")"
