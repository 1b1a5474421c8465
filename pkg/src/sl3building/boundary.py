"""Chambers at infinity of the SL3 building: flags, sectors and retractions.

A chamber at infinity is a complete flag <f1> < <f1, f2> in Q^3, stored as a
canonical column-echelon coset representative, so equality of flags is tuple
equality.  Relative position of two flags is an element of S3 determined by
the dimension table dim(C_i meet D_j); opposite means the order-reversing
permutation.  Sector membership, the basis sets of the cone topology, and the
retraction onto an apartment centered at one of its ideal chambers are all
decided through exact lattice normal forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from .padic_linalg import (
    columns,
    cross,
    det3,
    flag_adapted_basis,
    from_columns,
    integerize,
    is_diagonal_ascending,
    lattice_canonical,
    mat_inv3,
    mat_mul,
    primitive_vector,
    rank,
    valuation_int,
)
from .building import Frame, LatticeVertex, frame_vertex


IDENTITY_PERM = (0, 1, 2)
LONGEST_PERM = (2, 1, 0)
ALL_PERMS = tuple(permutations(range(3)))


def perm_length(w):
    """Number of inversions; the longest element has length 3."""
    return sum(1 for i in range(3) for j in range(i + 1, 3) if w[i] > w[j])


class NotOppositeError(ValueError):
    """Raised when an operation requires a pair of opposite chambers."""


class HorizonExceededError(RuntimeError):
    """Raised when an iterative limit fails to stabilize within its horizon."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory or []


# ---------------------------------------------------------------------------
# flags
# ---------------------------------------------------------------------------

def _flag_canonical(m):
    cols = [[Fraction(e) for e in col] for col in columns(m)]
    if det3(m) == 0:
        raise ValueError("flag matrix must be invertible")
    pivots = []
    for j in range(3):
        col = cols[j]
        for i, pr in enumerate(pivots):
            if col[pr] != 0:
                f = col[pr] / cols[i][pr]
                col = [a - f * b for a, b in zip(col, cols[i])]
        piv = max(r for r in range(3) if col[r] != 0)
        inv = 1 / col[piv]
        cols[j] = [a * inv for a in col]
        pivots.append(piv)
    return from_columns(tuple(tuple(c) for c in cols))


@dataclass(frozen=True)
class Flag:
    """Complete flag in Q^3, canonical coset representative of its matrix."""

    matrix: tuple

    @classmethod
    def from_matrix(cls, m):
        return cls(_flag_canonical(m))

    @classmethod
    def standard(cls):
        return cls.from_matrix(((1, 0, 0), (0, 1, 0), (0, 0, 1)))

    @classmethod
    def reversed_standard(cls):
        return cls.from_matrix(((0, 0, 1), (0, 1, 0), (1, 0, 0)))

    @classmethod
    def from_line_and_plane(cls, line, plane_basis):
        u, v = plane_basis
        w = cross(u, v)
        third = next(tuple(1 if r == j else 0 for r in range(3))
                     for j in range(3)
                     if sum(w[k] * (1 if k == j else 0) for k in range(3)) != 0)
        second = u if rank(from_columns((line, u))) == 2 else v
        return cls.from_matrix(from_columns((line, second, third)))

    def apply(self, g):
        return Flag.from_matrix(mat_mul(g, self.matrix))

    @property
    def line(self):
        """Canonical primitive vector spanning the one-dimensional step."""
        return primitive_vector(columns(self.matrix)[0])

    @property
    def plane_normal(self):
        """Canonical primitive normal vector of the two-dimensional step."""
        c = columns(self.matrix)
        return primitive_vector(cross(c[0], c[1]))


# ---------------------------------------------------------------------------
# relative position
# ---------------------------------------------------------------------------

def _intersection_dims(c, d):
    """dims[i][j] = dim(C_(i+1) meet D_(j+1)) for i, j in {0, 1, 2}."""
    ccols = columns(c.matrix)
    dcols = columns(d.matrix)
    dims = [[0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            stacked = from_columns(ccols[: i + 1] + dcols[: j + 1])
            dims[i][j] = (i + 1) + (j + 1) - rank(stacked)
    return dims


def weyl_distance(c, d):
    """Relative position of two flags as a permutation w of {0, 1, 2}.

    Convention: dim(C_i meet D_j) = #{a <= i : w(a) <= j} (1-indexed), i.e. the
    increments of the dimension table form the permutation matrix of w.
    Identical flags give the identity, opposite flags the order reversal.
    """
    dims = _intersection_dims(c, d)

    def entry(i, j):
        base = dims[i][j]
        if i > 0:
            base -= dims[i - 1][j]
        if j > 0:
            base -= dims[i][j - 1]
        if i > 0 and j > 0:
            base += dims[i - 1][j - 1]
        return base

    w = [None] * 3
    for i in range(3):
        for j in range(3):
            if entry(i, j) == 1:
                w[i] = j
    return tuple(w)


def is_opposite(c, d):
    """Transversality: the line of each flag avoids the plane of the other."""
    cc = columns(c.matrix)
    dc = columns(d.matrix)
    return det3(from_columns((cc[0], dc[0], dc[1]))) != 0 and \
        det3(from_columns((dc[0], cc[0], cc[1]))) != 0


def apartment_from_opposite(c, d):
    """The frame of the unique apartment whose boundary contains both flags."""
    if not is_opposite(c, d):
        raise NotOppositeError("chambers are not opposite")
    cc = columns(c.matrix)
    dc = columns(d.matrix)
    middle = cross(cross(cc[0], cc[1]), cross(dc[0], dc[1]))
    return Frame.from_lines((cc[0], middle, dc[0]))


def apartment_chambers(frame):
    """The six ideal chambers of the apartment of a frame."""
    out = []
    for order in permutations(range(3)):
        v = frame.lines
        out.append(Flag.from_matrix(from_columns((v[order[0]], v[order[1]], v[order[2]]))))
    return tuple(out)


def chamber_order_in_frame(frame, c):
    """The ordering (i, j, k) of the frame lines realizing the chamber c."""
    for order in permutations(range(3)):
        v = frame.lines
        cand = Flag.from_matrix(from_columns((v[order[0]], v[order[1]], v[order[2]])))
        if cand == c:
            return order
    raise ValueError("chamber does not belong to the apartment at infinity")


def opposite_in_apartment(d, frame):
    """Some chamber of the frame apartment opposite d; one always exists."""
    for e in apartment_chambers(frame):
        if is_opposite(d, e):
            return e
    raise AssertionError("no apartment chamber opposite the given flag; "
                         "this contradicts opposition in spherical buildings")


# ---------------------------------------------------------------------------
# sectors and basis sets
# ---------------------------------------------------------------------------

def sector_membership(x, c, y):
    """Whether the vertex y lies in the (closed) sector from x toward c.

    Decided algebraically: in a basis of the lattice of x adapted to c, the
    lattice of y must be spanned by p-power multiples of the basis vectors
    with exponents increasing toward the back of the flag.
    """
    p = x.p
    g = mat_mul(mat_inv3(x.matrix), c.matrix)
    h = flag_adapted_basis(g, p)
    n = mat_mul(mat_inv3(mat_mul(x.matrix, h)), y.matrix)
    canon = lattice_canonical(n, p)
    return is_diagonal_ascending(canon, p)


def basis_set_contains(x, y, c):
    """Membership of c in the cone-topology basis set U_x(y).

    U_x(y) is the set of chambers whose sector at x passes through y; x and y
    must be vertices of the same type.
    """
    if x.p != y.p:
        raise ValueError("vertices live over different primes")
    if x.vertex_type != y.vertex_type:
        raise ValueError("basis sets require same-type vertices")
    return sector_membership(x, c, y)


def growth_ray_vertex(x, c, t):
    """The vertex at parameter t on the equal-growth ray of the sector from x toward c.

    Its vector distance from x is (2t, t, 0), the direction that advances
    through every wall of the sector at the same rate.
    """
    p = x.p
    g = mat_mul(mat_inv3(x.matrix), c.matrix)
    h = flag_adapted_basis(g, p)
    cols = columns(mat_mul(x.matrix, h))
    scaled = (cols[0], tuple(e * p ** t for e in cols[1]),
              tuple(e * p ** (2 * t) for e in cols[2]))
    return LatticeVertex.from_matrix(p, from_columns(scaled))


def common_depth(c, d, o, rmax):
    """How far the sectors from o toward c and d agree along the growth ray.

    Returns the largest t <= rmax such that the vertex at parameter t on the
    growth ray of Q(o, c) lies in Q(o, d) as well; 0 when only the base point
    does.  This realizes the entourage scale of the cone-topology uniformity.
    """
    if c == d:
        return rmax
    depth = 0
    for t in range(1, rmax + 1):
        y = growth_ray_vertex(o, c, t)
        if sector_membership(o, d, y):
            depth = t
        else:
            break
    return depth


# ---------------------------------------------------------------------------
# retractions
# ---------------------------------------------------------------------------

def retraction(frame, c, x):
    """Retraction of the vertex x onto the frame apartment, centered at c.

    c must be an ideal chamber of the apartment.  The image is the apartment
    vertex whose exponents are the Iwasawa diagonal of the lattice of x with
    respect to the frame basis ordered by c; it fixes the apartment pointwise
    and does not increase distances.
    """
    order = chamber_order_in_frame(frame, c)
    h = frame.matrix(order)
    n = mat_mul(mat_inv3(h), x.matrix)
    canon = lattice_canonical(n, x.p)
    exps = tuple(valuation_int(canon[i][i], x.p) for i in range(3))
    m = [0, 0, 0]
    for k in range(3):
        m[order[k]] = exps[k]
    return frame_vertex(frame, x.p, tuple(m))


def retraction_exponents(frame, c, x):
    """Iwasawa exponents of x in the c-ordered frame coordinates."""
    order = chamber_order_in_frame(frame, c)
    h = frame.matrix(order)
    n = mat_mul(mat_inv3(h), x.matrix)
    canon = lattice_canonical(n, x.p)
    return tuple(valuation_int(canon[i][i], x.p) for i in range(3)), order


def boundary_retraction(frame, c, d, p, horizon=100000):
    """Boundary extension of the retraction centered at c, evaluated at d.

    Retracts the vertices x_n going to infinity along the d-direction ray and
    reports the ideal chamber of the apartment whose sector their images
    finally follow.  The retracted path is piecewise linear in n (its pivot
    exponents are minima of linear forms read off minor valuations), so the
    step at which the direction stabilizes is certified exactly: past the
    last crossing of those linear forms the exponent increments are constant
    and their growth rates name the chamber.
    """
    for e in apartment_chambers(frame):
        if e == d:
            return d
    order_c = chamber_order_in_frame(frame, c)
    h = frame.matrix(order_c)
    o = frame_vertex(frame, p, (0, 0, 0))
    g = mat_mul(mat_inv3(o.matrix), d.matrix)
    adapted = flag_adapted_basis(g, p)
    n0, _ = integerize(mat_mul(mat_inv3(h), mat_mul(o.matrix, adapted)))
    ray = (0, 1, 2)  # column j of the ray vertex scales by p^(ray_j * n)
    # linear forms for the bottom-up corner-minor valuations of n0 * diag
    row2 = [(valuation_int(n0[2][j], p), ray[j])
            for j in range(3) if n0[2][j] != 0]
    pairs12 = []
    for (j1, j2) in ((0, 1), (0, 2), (1, 2)):
        m = n0[1][j1] * n0[2][j2] - n0[1][j2] * n0[2][j1]
        if m != 0:
            pairs12.append((valuation_int(m, p), ray[j1] + ray[j2]))
    det_v = valuation_int(det3(n0), p)

    def crossing_bound(forms):
        best = 0
        for a, (va, sa) in enumerate(forms):
            for vb, sb in forms[a + 1:]:
                if sa != sb:
                    best = max(best, abs(va - vb))
        return best

    n_star = max(crossing_bound(row2), crossing_bound(pairs12)) + 1
    if n_star > horizon:
        raise HorizonExceededError(
            "certified stabilization bound exceeds the horizon",
            trajectory=[("n_star", n_star)])

    def exps_at(n):
        a3 = min(v + s * n for v, s in row2)
        a23 = min(v + s * n for v, s in pairs12)
        total = det_v + 3 * n
        return (total - a23, a23 - a3, a3)

    e_lo = exps_at(n_star)
    e_hi = exps_at(n_star + 1)
    slopes = tuple(b - a for a, b in zip(e_lo, e_hi))
    if len(set(slopes)) != 3:
        raise AssertionError("retraction direction degenerated onto a wall; "
                             "the limit chamber must be unique")
    ranking = sorted(range(3), key=lambda i: slopes[i])
    direction = tuple(order_c[i] for i in ranking)
    v = frame.lines
    return Flag.from_matrix(from_columns(
        (v[direction[0]], v[direction[1]], v[direction[2]])))
