"""Exact arithmetic in Q(sqrt(R)) for the quartic longitudinal coefficients.

The A/B/C/D polynomials suffer catastrophic cancellation in floating point
when jS and jI are close (the usual regime, since both Larmor frequencies are
tiny compared with 1/tau_c). Every float is an exact dyadic rational, so we
evaluate the polynomials with :class:`fractions.Fraction` and carry the single
square root symbolically. Conversion to float is done so that no subtraction
of nearly equal quantities ever happens.
"""
from __future__ import annotations

import math
from fractions import Fraction


class Surd:
    """p + q*sqrt(R) with rational p, q and a fixed rational radicand R >= 0."""

    __slots__ = ("p", "q", "radicand")

    def __init__(self, p, q, radicand: Fraction):
        self.p = Fraction(p)
        self.q = Fraction(q)
        self.radicand = radicand

    def _coerce(self, other) -> "Surd":
        if isinstance(other, Surd):
            return other
        return Surd(other, 0, self.radicand)

    def __add__(self, other):
        other = self._coerce(other)
        return Surd(self.p + other.p, self.q + other.q, self.radicand)

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.p, -self.q, self.radicand)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        r = self.radicand
        return Surd(
            self.p * other.p + self.q * other.q * r,
            self.p * other.q + self.q * other.p,
            r,
        )

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        """(p + q sqrt R)(p - q sqrt R), exactly."""
        return self.p * self.p - self.q * self.q * self.radicand

    def __truediv__(self, other):
        other = self._coerce(other)
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by a zero surd")
        conj = Surd(other.p, -other.q, self.radicand)
        prod = self * conj
        return Surd(prod.p / n, prod.q / n, self.radicand)

    def is_zero(self) -> bool:
        return self.p == 0 and (self.q == 0 or self.radicand == 0)

    def sign(self) -> int:
        if self.is_zero():
            return 0
        a = self.p
        b_sq = self.q * self.q * self.radicand
        if self.q == 0 or self.radicand == 0:
            return 1 if a > 0 else -1
        if a == 0:
            return 1 if self.q > 0 else -1
        if (a > 0) == (self.q > 0):
            return 1 if a > 0 else -1
        # opposite signs: compare a^2 with q^2 R
        if a * a > b_sq:
            return 1 if a > 0 else -1
        return 1 if self.q > 0 else -1

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __float__(self) -> float:
        p, q = self.p, self.q
        if q == 0 or self.radicand == 0:
            return float(p)
        root = math.sqrt(self.radicand)
        if p == 0 or (p > 0) == (q > 0):
            return float(p) + float(q) * root
        # p and q*sqrt(R) have opposite signs; use the conjugate
        return float(self.norm()) / (float(p) - float(q) * root)

    def __repr__(self):
        return f"Surd({float(self.p)!r} + {float(self.q)!r}*sqrt({float(self.radicand)!r}))"
