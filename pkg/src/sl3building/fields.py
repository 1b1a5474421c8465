"""Small finite fields for exhaustive cross-checks.

Supports the prime fields F_p and the four-element field F_4 (bit-polynomial
representation modulo x^2 + x + 1).  Elements are plain ints in range(q);
only the handful of operations needed for 3x3 matrix work over the field are
provided.
"""

from __future__ import annotations

_GF4_MUL = {
    (0, 0): 0, (0, 1): 0, (0, 2): 0, (0, 3): 0,
    (1, 0): 0, (1, 1): 1, (1, 2): 2, (1, 3): 3,
    (2, 0): 0, (2, 1): 2, (2, 2): 3, (2, 3): 1,
    (3, 0): 0, (3, 1): 3, (3, 2): 1, (3, 3): 2,
}


class FiniteField:
    """Arithmetic in F_q for q prime or q = 4."""

    def __init__(self, q):
        from .padic_linalg import is_prime
        if q != 4 and not is_prime(q):
            raise ValueError("supported orders: primes and 4")
        self.q = q
        self._gf4 = (q == 4)

    def elements(self):
        return range(self.q)

    def units(self):
        return range(1, self.q)

    def add(self, a, b):
        return a ^ b if self._gf4 else (a + b) % self.q

    def neg(self, a):
        return a if self._gf4 else (-a) % self.q

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        return _GF4_MUL[(a, b)] if self._gf4 else (a * b) % self.q

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        if self._gf4:
            return next(b for b in self.units() if self.mul(a, b) == 1)
        return pow(a, -1, self.q)

    # 3x3 matrix helpers over the field -------------------------------------

    def mat_mul(self, a, b):
        return tuple(tuple(
            self._dot(tuple(a[i][k] for k in range(3)),
                      tuple(b[k][j] for k in range(3)))
            for j in range(3)) for i in range(3))

    def mat_vec(self, m, v):
        return tuple(self._dot(row, v) for row in m)

    def _dot(self, u, v):
        acc = 0
        for x, y in zip(u, v):
            acc = self.add(acc, self.mul(x, y))
        return acc

    def det3(self, m):
        (a, b, c), (d, e, f), (g, h, i) = m
        t1 = self.mul(a, self.sub(self.mul(e, i), self.mul(f, h)))
        t2 = self.mul(b, self.sub(self.mul(d, i), self.mul(f, g)))
        t3 = self.mul(c, self.sub(self.mul(d, h), self.mul(e, g)))
        return self.add(self.sub(t1, t2), t3)

    def proportional(self, u, v):
        """Whether two nonzero vectors span the same line."""
        k = next(i for i, e in enumerate(u) if e != 0)
        if v[k] == 0:
            return False
        r = self.mul(v[k], self.inv(u[k]))
        return all(self.mul(u[i], r) == v[i] for i in range(3))
