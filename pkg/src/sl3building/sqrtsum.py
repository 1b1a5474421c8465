"""Exact comparison of sums of square roots of nonnegative integers.

Values of the convex functionals on the building are sums of up to three
square roots of integers.  Equality is decided symbolically: each sqrt(n) is
written c * sqrt(s) with s squarefree, and square roots of distinct
squarefree integers are linearly independent over Q.  Strict comparisons are
decided by interval refinement with integer square roots, which terminates
because equality has already been ruled out.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import isqrt


@lru_cache(maxsize=None)
def _squarefree_split(n):
    """n = a^2 * s with s squarefree; returns (a, s)."""
    a, s, d = 1, 1, 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            a *= d ** (e // 2)
            if e % 2:
                s *= d
        d += 1 if d == 2 else 2
    return a, s * n


class SqrtSum:
    """An exact nonnegative value of the form sum of c_s * sqrt(s)."""

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        collected = {}
        for s, c in terms:
            if c:
                collected[s] = collected.get(s, Fraction(0)) + Fraction(c)
        self.terms = tuple(sorted((s, c) for s, c in collected.items() if c != 0))

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def sqrt_int(cls, n):
        if n < 0:
            raise ValueError("negative radicand")
        if n == 0:
            return cls()
        a, s = _squarefree_split(n)
        return cls(((s, Fraction(a)),))

    @classmethod
    def of_squares(cls, squares):
        """The value sqrt(q1) + sqrt(q2) + ... for integer squared distances."""
        out = cls()
        for q in squares:
            out = out + cls.sqrt_int(q)
        return out

    def __add__(self, other):
        return SqrtSum(self.terms + other.terms)

    def __eq__(self, other):
        return isinstance(other, SqrtSum) and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def is_zero(self):
        return not self.terms

    def enclosure(self, digits=20):
        """Certified rational enclosure (lo, hi) with hi - lo <= len * 10^-digits."""
        scale = 10 ** digits
        lo = Fraction(0)
        hi = Fraction(0)
        for s, c in self.terms:
            root_lo = Fraction(isqrt(s * scale * scale), scale)
            root_hi = root_lo + Fraction(1, scale)
            if c > 0:
                lo += c * root_lo
                hi += c * root_hi
            else:
                lo += c * root_hi
                hi += c * root_lo
        return lo, hi

    def compare(self, other):
        """-1, 0 or 1; exact."""
        if self.terms == other.terms:
            return 0
        digits = 12
        while True:
            lo1, hi1 = self.enclosure(digits)
            lo2, hi2 = other.enclosure(digits)
            if hi1 < lo2:
                return -1
            if hi2 < lo1:
                return 1
            digits *= 2
            if digits > 8000:  # unreachable: equality was excluded symbolically
                raise RuntimeError("interval refinement failed to separate")

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def __float__(self):
        lo, hi = self.enclosure(18)
        return float((lo + hi) / 2)

    def __repr__(self):
        if not self.terms:
            return "SqrtSum(0)"
        parts = " + ".join(f"{c}*sqrt({s})" if c != 1 else f"sqrt({s})"
                           for s, c in self.terms)
        return f"SqrtSum({parts})"
