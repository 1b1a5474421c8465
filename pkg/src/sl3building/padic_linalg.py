"""Exact linear algebra over Q with p-adic valuations.

Everything in this package is exact.  A matrix is a tuple of row tuples whose
entries are ints or ``fractions.Fraction``; a vector is a tuple.  Normal forms
(column Hermite form, Smith form) are taken over the local ring Z_(p), the
rationals with denominator coprime to p, using minimal-valuation pivoting.
No floating point enters any predicate.

The two workhorses are

* ``lattice_canonical``: the unique upper-triangular basis matrix of a
  Z_(p)-lattice, with p-power pivots and reduced off-diagonal entries,
  homothety-normalized so the smallest elementary divisor is p^0.
* ``smith_exponents``: the elementary-divisor exponents of an invertible
  rational matrix, computed by elimination (an independent minor-gcd oracle
  lives in the test suite).

Hot paths work on integer matrices reduced modulo p^A for a sufficiently
large A; this is sound because a finite-index sublattice L of Z^3 with
det-valuation D satisfies p^D Z^3 <= L, so L is determined mod p^(D+1).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


class SingularMatrixError(ValueError):
    """Raised when an operation requires an invertible matrix."""


class ZeroValuationError(ValueError):
    """Raised when the p-adic valuation of zero is requested."""


# ---------------------------------------------------------------------------
# scalars
# ---------------------------------------------------------------------------

def is_prime(p):
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def require_prime(p):
    if not is_prime(p):
        raise ValueError(f"p must be a prime >= 2, got {p}")


def valuation_int(n, p):
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ZeroValuationError("valuation of 0 is undefined")
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation(x, p):
    """p-adic valuation of a nonzero rational.

    v(p) = 1, v(3/4) = -2 for p = 2, and v(x*y) = v(x) + v(y).
    """
    if isinstance(x, int):
        return valuation_int(x, p)
    if x == 0:
        raise ZeroValuationError("valuation of 0 is undefined")
    return valuation_int(x.numerator, p) - valuation_int(x.denominator, p)


def unit_part(x, p):
    """The p-adic unit u with x = p^v * u."""
    v = valuation(x, p)
    return Fraction(x) / Fraction(p) ** v


# ---------------------------------------------------------------------------
# plain matrix helpers (rows of tuples, exact entries)
# ---------------------------------------------------------------------------

def mat(rows):
    return tuple(tuple(r) for r in rows)


def identity(n=3):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(m):
    return tuple(zip(*m))


def mat_mul(a, b):
    bt = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def mat_vec(m, v):
    return tuple(sum(x * y for x, y in zip(row, v)) for row in m)


def mat_scale(m, c):
    return tuple(tuple(c * e for e in row) for row in m)


def det3(m):
    (a, b, c), (d, e, f), (g, h, i) = m
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def adjugate3(m):
    (a, b, c), (d, e, f), (g, h, i) = m
    return (
        (e * i - f * h, c * h - b * i, b * f - c * e),
        (f * g - d * i, a * i - c * g, c * d - a * f),
        (d * h - e * g, b * g - a * h, a * e - b * d),
    )


def mat_inv3(m):
    d = det3(m)
    if d == 0:
        raise SingularMatrixError("matrix is singular")
    d = Fraction(d)
    return tuple(tuple(Fraction(e) / d for e in row) for row in adjugate3(m))


def cross(u, v):
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def dot(u, v):
    return sum(x * y for x, y in zip(u, v))


def columns(m):
    return tuple(zip(*m))


def from_columns(cols):
    return tuple(zip(*cols))


def rank(m):
    """Exact rank of a matrix over Q (Gaussian elimination on Fractions)."""
    rows = [[Fraction(e) for e in row] for row in m]
    nrows, ncols = len(rows), len(rows[0]) if rows else 0
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, nrows) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [e * inv for e in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [e - f * g for e, g in zip(rows[i], rows[r])]
        r += 1
        if r == nrows:
            break
    return r


def primitive_vector(v):
    """Scale a nonzero rational vector to an integer vector with content 1.

    The sign is normalized so the last nonzero coordinate is positive, which
    makes the result a canonical representative of the line spanned by v.
    """
    if all(e == 0 for e in v):
        raise ValueError("zero vector has no primitive representative")
    den = 1
    for e in v:
        if isinstance(e, Fraction):
            den = den * e.denominator // gcd(den, e.denominator)
    ints = [int(e * den) for e in v]
    g = 0
    for e in ints:
        g = gcd(g, e)
    ints = [e // g for e in ints]
    last = next(e for e in reversed(ints) if e != 0)
    if last < 0:
        ints = [-e for e in ints]
    return tuple(ints)


def integerize(m):
    """Clear denominators of a rational matrix by a single positive scalar.

    Returns the integer matrix c*m together with the p-independent scalar c.
    Scaling a basis matrix by a scalar only moves the lattice inside its
    homothety class, so homothety-normalized constructions may ignore c.
    """
    den = 1
    for row in m:
        for e in row:
            if isinstance(e, Fraction):
                den = den * e.denominator // gcd(den, e.denominator)
    if den == 1:
        return tuple(tuple(int(e) for e in row) for row in m), 1
    return tuple(tuple(int(e * den) for e in row) for row in m), den


def strip_p_content(m_int, p):
    """Divide an integer matrix by the largest possible power of p.

    Returns (matrix, k) with m_int = p^k * matrix and matrix not divisible
    by p entrywise.
    """
    v = None
    for row in m_int:
        for e in row:
            if e != 0:
                w = valuation_int(e, p)
                v = w if v is None else min(v, w)
                if v == 0:
                    return m_int, 0
    if v is None:
        raise ValueError("zero matrix")
    q = p ** v
    return tuple(tuple(e // q for e in row) for row in m_int), v


# ---------------------------------------------------------------------------
# normal forms over Z_(p)
# ---------------------------------------------------------------------------

def _capped_val(e, p, cap):
    """Valuation of a residue in [0, p^cap), with 0 treated as valuation cap."""
    if e == 0:
        return cap
    v = 0
    while e % p == 0:
        e //= p
        v += 1
    return v


def lattice_canonical(m, p):
    """Canonical basis of the Z_(p)-lattice spanned by the columns of m.

    The result is the unique homothety-normalized upper-triangular integer
    matrix with pivots p^(a_i) and entries to the right of each pivot reduced
    to the canonical residue in [0, p^(a_i)).  Two rational matrices span
    homothetic lattices iff their canonical forms coincide.
    """
    m_int, _ = integerize(m)
    d = det3(m_int)
    if d == 0:
        raise SingularMatrixError("columns do not span a lattice")
    m_int, _ = strip_p_content(m_int, p)
    big = valuation_int(det3(m_int), p) + 1
    q = p ** big
    cols = [list(col) for col in zip(*m_int)]
    cols = [[e % q for e in col] for col in cols]
    pivots = [0, 0, 0]
    for row in (2, 1, 0):
        best, best_v = None, None
        for j in range(row + 1):
            v = _capped_val(cols[j][row], p, big)
            if best_v is None or v < best_v:
                best, best_v = j, v
        if best_v >= big:  # cannot happen for a genuine lattice
            raise SingularMatrixError("degenerate column span")
        cols[row], cols[best] = cols[best], cols[row]
        pv = p ** best_v
        u = cols[row][row] // pv
        uinv = pow(u, -1, q)
        cols[row] = [(e * uinv) % q for e in cols[row]]
        pivots[row] = best_v
        for j in range(row):
            e = cols[j][row]
            if e:
                f = e // pv
                cols[j] = [(x - f * y) % q for x, y in zip(cols[j], cols[row])]
    # second pass: reduce entries above the pivots
    for j in (1, 2):
        for i in range(j - 1, -1, -1):
            mod = p ** pivots[i]
            r = cols[j][i] % mod
            f = (cols[j][i] - r) // mod
            if f:
                cols[j] = [(x - f * y) % q for x, y in zip(cols[j], cols[i])]
            cols[j][i] = r
    out = [[0, 0, 0], [0, 0, 0], [0, 0, 0]]
    for i in range(3):
        out[i][i] = p ** pivots[i]
        for j in range(i + 1, 3):
            out[i][j] = cols[j][i] % (p ** pivots[i])
    return tuple(tuple(row) for row in out)


def hnf_pivot_exponents(m, p):
    """Exponents of the pivots of the canonical form, in row order.

    These are the Iwasawa diagonal exponents of the column span relative to
    the standard coordinate flag; they are not sorted.
    """
    c = lattice_canonical(m, p)
    return tuple(valuation_int(c[i][i], p) for i in range(3))


def is_diagonal_ascending(canon, p):
    """True if a canonical lattice matrix is diagonal with ascending exponents."""
    for i in range(3):
        for j in range(3):
            if i != j and canon[i][j] != 0:
                return False
    e = [valuation_int(canon[i][i], p) for i in range(3)]
    return e[0] <= e[1] <= e[2]


def smith_exponents(m, p):
    """Elementary-divisor exponents of an invertible rational matrix over Z_(p).

    Returns the sorted triple (a1 >= a2 >= a3) with U m V = diag(p^a1, p^a2,
    p^a3) for suitable U, V invertible over Z_(p); the sum equals the
    valuation of det m.  Computed by elimination with minimal-valuation
    pivoting on an integer scaling of m.
    """
    m_int, den = integerize(m)
    d = det3(m_int)
    if d == 0:
        raise SingularMatrixError("smith_exponents requires det != 0")
    shift = valuation_int(den, p)
    m_int, content = strip_p_content(m_int, p)
    big = valuation_int(det3(m_int), p) + 1
    q = p ** big
    work = [[e % q for e in row] for row in m_int]
    active_r, active_c = [0, 1, 2], [0, 1, 2]
    exps = []
    while active_r:
        bi = bj = None
        bv = big
        for i in active_r:
            for j in active_c:
                v = _capped_val(work[i][j], p, big)
                if v < bv:
                    bi, bj, bv = i, j, v
        exps.append(bv)
        pv = p ** bv
        u = work[bi][bj] // pv
        uinv = pow(u, -1, q)
        for i in active_r:
            if i != bi and work[i][bj]:
                f = (work[i][bj] // pv) * uinv % q
                work[i] = [(x - f * y) % q for x, y in zip(work[i], work[bi])]
        for j in active_c:
            if j != bj and work[bi][j]:
                f = (work[bi][j] // pv) * uinv % q
                for i in active_r:
                    work[i][j] = (work[i][j] - f * work[i][bj]) % q
        active_r.remove(bi)
        active_c.remove(bj)
    exps = [e + content - shift for e in exps]
    return tuple(sorted(exps, reverse=True))


def smith_left_transform(m, p):
    """Adapted basis for the column span of an invertible rational matrix.

    Returns (P, d) with P invertible over Z_(p) and d ascending such that the
    lattice spanned by the columns of m equals the span of p^(d_i) * P_i,
    where P_i are the columns of P.  Exact Fraction arithmetic; use only off
    the hot paths.
    """
    work = [[Fraction(e) for e in row] for row in m]
    if det3(work) == 0:
        raise SingularMatrixError("smith_left_transform requires det != 0")
    left = [[Fraction(1 if i == j else 0) for j in range(3)] for i in range(3)]
    d = []
    for step in range(3):
        bi = bj = None
        bv = None
        for i in range(step, 3):
            for j in range(step, 3):
                if work[i][j] != 0:
                    v = valuation(work[i][j], p)
                    if bv is None or v < bv:
                        bi, bj, bv = i, j, v
        # row swap corresponds to swapping columns of the accumulated left part
        work[step], work[bi] = work[bi], work[step]
        for r in left:
            r[step], r[bi] = r[bi], r[step]
        for r in work:
            r[step], r[bj] = r[bj], r[step]
        u = unit_part(work[step][step], p)
        work[step] = [e / u for e in work[step]]
        for r in left:
            r[step] = r[step] * u
        pv = Fraction(p) ** bv
        for i in range(3):
            if i != step and work[i][step] != 0:
                f = work[i][step] / pv
                work[i] = [x - f * y for x, y in zip(work[i], work[step])]
                for r in left:
                    r[step] = r[step] + f * r[i]
        for j in range(step + 1, 3):
            if work[step][j] != 0:
                f = work[step][j] / pv
                for i in range(3):
                    work[i][j] = work[i][j] - f * work[i][step]
        d.append(bv)
    return tuple(tuple(r) for r in left), tuple(d)


def flag_adapted_basis(g, p):
    """Basis of Z_(p)^3 triangular for the complete flag of the columns of g.

    Returns an integer matrix H with unit determinant valuation whose columns
    (f1, f2, f3) satisfy f1 in <g1> and f2 in <g1, g2>.  The first column is
    primitive in Z^3, the first two span the p-saturation of the flag plane.
    """
    cols = columns(g)
    f1 = primitive_vector(cols[0])
    n = primitive_vector(cross(cols[0], cols[1]))
    k = next(i for i in range(3) if n[i] % p != 0)
    basis = [tuple(n[k] if r == i else (-n[i] if r == k else 0) for r in range(3))
             for i in range(3) if i != k]
    idx = [i for i in range(3) if i != k]
    alpha = Fraction(f1[idx[0]], n[k])
    f2 = basis[1] if alpha != 0 and valuation(alpha, p) == 0 else basis[0]
    w = cross(f1, f2)
    j = min((i for i in range(3) if w[i] != 0), key=lambda i: valuation_int(w[i], p))
    if valuation_int(w[j], p) != 0:
        raise SingularMatrixError("flag columns are dependent")
    f3 = tuple(1 if r == j else 0 for r in range(3))
    return from_columns((f1, f2, f3))


# ---------------------------------------------------------------------------
# germ extraction (reductions mod p of a relative lattice position)
# ---------------------------------------------------------------------------

def _mod_p_column_space_line(m_int, p):
    """If the mod-p reduction of m has rank 1, return a spanning column."""
    red = [[e % p for e in row] for row in m_int]
    cols = list(zip(*red))
    nonzero = [c for c in cols if any(c)]
    if not nonzero:
        return None
    base = nonzero[0]
    k = next(i for i, e in enumerate(base) if e)
    inv = pow(base[k], -1, p)
    for c in nonzero[1:]:
        f = (c[k] * inv) % p
        if any((e - f * b) % p for e, b in zip(c, base)):
            return None  # rank >= 2
    return tuple(e % p for e in base)


def residue_germ_parts(n_int, p):
    """Germ data of the segment from the standard lattice toward span(n_int).

    n_int is an integer basis matrix of the target lattice, already
    normalized so its smallest elementary-divisor exponent is 0 (use
    strip_p_content).  Returns (line, plane_normal) over F_p, either of which
    is None when the corresponding part of the germ degenerates:

    * line: the mod-p image of the target lattice, when one-dimensional;
    * plane_normal: a normal vector of the mod-p image of the codimension-one
      step of the p-power filtration, read off the transposed adjugate.
    """
    line = _mod_p_column_space_line(n_int, p)
    adj_t = transpose(adjugate3(n_int))
    adj_t, _ = strip_p_content(adj_t, p)
    normal = _mod_p_column_space_line(adj_t, p)
    return line, normal
