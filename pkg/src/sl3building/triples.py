"""Triples of chambers at infinity: genericity and the barycenter construction.

An antipodal triple (pairwise opposite chambers) spans three apartments, one
per pair.  The triple is generic when those three apartments share no ideal
simplex at infinity.  For generic triples the sum of distances to the three
apartments is a proper convex function on the building; its vertex minimizers
form a finite equivariant set computed here by certified expanding-shell
searches inside the three apartments, merged through the integrality of
squared distances.

Apartment boundaries are compared through their finitely many ideal
simplices: three line vertices, three plane vertices and six chambers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .padic_linalg import (
    cross,
    det3,
    integerize,
    mat_inv3,
    mat_mul,
    primitive_vector,
    valuation_int,
)
from .building import (
    LatticeVertex,
    _eisenstein_ball,
    distance_to_apartment,
    dominant,
    frame_vertex,
    weyl_dist2,
)
from .boundary import (
    NotOppositeError,
    apartment_chambers,
    apartment_from_opposite,
    is_opposite,
)
from .sqrtsum import SqrtSum


@dataclass(frozen=True)
class ChamberTriple:
    """Three distinct ideal chambers, order preserved for bookkeeping."""

    chambers: tuple

    @classmethod
    def of(cls, c1, c2, c3):
        if len({c1, c2, c3}) != 3:
            raise ValueError("triple must consist of distinct chambers")
        return cls((c1, c2, c3))

    def apply(self, g):
        return ChamberTriple(tuple(c.apply(g) for c in self.chambers))

    def pairwise_positions(self):
        from .boundary import weyl_distance
        c1, c2, c3 = self.chambers
        return {(0, 1): weyl_distance(c1, c2),
                (0, 2): weyl_distance(c1, c3),
                (1, 2): weyl_distance(c2, c3)}


def is_antipodal(triple):
    c1, c2, c3 = triple.chambers
    return is_opposite(c1, c2) and is_opposite(c1, c3) and is_opposite(c2, c3)


# ---------------------------------------------------------------------------
# ideal simplices of a frame apartment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ApartmentIdealSimplices:
    """The finite simplicial data of an apartment boundary.

    lines and planes are the ideal vertices (planes stored by a canonical
    normal vector); chambers are the six ideal chambers.
    """

    lines: frozenset
    planes: frozenset
    chambers: frozenset

    @property
    def simplex_count(self):
        return len(self.lines) + len(self.planes) + len(self.chambers)

    def intersection(self, other):
        return ApartmentIdealSimplices(
            self.lines & other.lines,
            self.planes & other.planes,
            self.chambers & other.chambers)

    def is_empty(self):
        return not (self.lines or self.planes or self.chambers)


def apartment_ideal_simplices(frame):
    v = frame.lines
    lines = frozenset(v)
    planes = frozenset(primitive_vector(cross(v[i], v[j]))
                       for i in range(3) for j in range(i + 1, 3))
    chambers = frozenset(apartment_chambers(frame))
    return ApartmentIdealSimplices(lines, planes, chambers)


def apartment_infinity_intersection(frame1, frame2):
    """Exact common ideal simplices of two frame apartments."""
    return apartment_ideal_simplices(frame1).intersection(
        apartment_ideal_simplices(frame2))


def pairwise_frames(triple):
    c1, c2, c3 = triple.chambers
    return (apartment_from_opposite(c1, c2),
            apartment_from_opposite(c1, c3),
            apartment_from_opposite(c2, c3))


def is_generic(triple):
    """Antipodal with no ideal simplex common to all three pair apartments."""
    if not is_antipodal(triple):
        return False
    f12, f13, f23 = pairwise_frames(triple)
    s12 = apartment_ideal_simplices(f12)
    s13 = apartment_ideal_simplices(f13)
    s23 = apartment_ideal_simplices(f23)
    return s12.intersection(s13).intersection(s23).is_empty()


def construct_generic(c1, c2, p, rng=None, depth=6, candidates=None,
                      max_draws=200):
    """A chamber completing an opposite pair to a generic triple.

    Candidates are taken from an explicit iterable when provided, otherwise
    harmonic-sampled at the given depth.  Each candidate is first screened
    against all six ideal chambers of the apartment of (c1, c2); a candidate
    opposite all of them is returned after a full genericity check.
    """
    if not is_opposite(c1, c2):
        raise NotOppositeError("construct_generic requires opposite chambers")
    frame = apartment_from_opposite(c1, c2)
    six = apartment_chambers(frame)

    def gen():
        if candidates is not None:
            yield from candidates
        else:
            from .stochastics import harmonic_sample
            x = LatticeVertex.standard(p)
            while True:
                yield harmonic_sample(x, depth, rng)

    draws = 0
    for c3 in gen():
        draws += 1
        if draws > max_draws:
            break
        if all(is_opposite(c3, d) for d in six):
            triple = ChamberTriple.of(c1, c2, c3)
            if is_generic(triple):
                return c3
    raise RuntimeError(f"no generic completion found within {max_draws} draws")


# ---------------------------------------------------------------------------
# the convex functional and its vertex minimizers
# ---------------------------------------------------------------------------

class ApartmentPairDistance:
    """Exact distances between vertices of two frame apartments.

    For fixed frames with matrices H and H', the vector distance between the
    vertex at exponents m in H and the vertex at exponents m' in H' is read
    off the valuations of the minors of K = H'^-1 H, each shifted by the
    exponents; scaling rows and columns by p-powers rescales each minor
    exactly, so the precomputation is loss-free.
    """

    _PAIRS = ((0, 1), (0, 2), (1, 2))

    def __init__(self, frame_from, frame_to, p):
        self.p = p
        self.frame_from = frame_from
        self.frame_to = frame_to
        k_mat = mat_mul(mat_inv3(frame_to.matrix()), frame_from.matrix())
        k_int, _ = integerize(k_mat)
        self.entry_val = tuple(
            tuple(valuation_int(e, p) if e else None for e in row)
            for row in k_int)
        minors = {}
        for a, (i1, i2) in enumerate(self._PAIRS):
            for b, (j1, j2) in enumerate(self._PAIRS):
                m = k_int[i1][j1] * k_int[i2][j2] - k_int[i1][j2] * k_int[i2][j1]
                minors[(a, b)] = valuation_int(m, p) if m else None
        self.minor_val = minors
        self.det_val = valuation_int(det3(k_int), p)

    def theta(self, m, m_to):
        e1 = min(v + m[j] - m_to[i]
                 for i in range(3) for j, v in enumerate(self.entry_val[i])
                 if v is not None)
        e2 = None
        for a, (i1, i2) in enumerate(self._PAIRS):
            for b, (j1, j2) in enumerate(self._PAIRS):
                v = self.minor_val[(a, b)]
                if v is None:
                    continue
                cand = v + m[j1] + m[j2] - m_to[i1] - m_to[i2]
                e2 = cand if e2 is None else min(e2, cand)
        e3 = self.det_val + sum(m) - sum(m_to)
        return dominant((e1, e2 - e1, e3 - e2))

    def dist2_to_apartment(self, m):
        """Certified min squared distance from the m-vertex to the target apartment."""
        cur = (0, 0, 0)
        best = weyl_dist2(self.theta(m, cur))
        moves = ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1))
        improved = True
        while improved and best > 0:
            improved = False
            for mv in moves:
                cand = tuple(a + b for a, b in zip(cur, mv))
                q = weyl_dist2(self.theta(m, cand))
                if q < best:
                    cur, best, improved = cand, q, True
                    break
        if best == 0:
            return 0
        for (i, j) in _eisenstein_ball(4 * best):
            q = weyl_dist2(self.theta(m, (cur[0] + i, cur[1] + j, cur[2])))
            if q < best:
                best = q
        return best


def distance_sum_squares(triple, x):
    """The three exact squared apartment distances entering the convex functional."""
    if not is_generic(triple):
        raise ValueError("the functional is defined on generic triples only")
    out = []
    for frame in pairwise_frames(triple):
        q, _ = distance_to_apartment(x, frame)
        out.append(q)
    return tuple(out)


def distance_sum(triple, x):
    """Exact value (as a SqrtSum) of the sum of distances to the pair apartments."""
    return SqrtSum.of_squares(distance_sum_squares(triple, x))


@dataclass(frozen=True)
class BarycenterResult:
    """Certified vertex minimizers of the apartment-distance sum.

    min_value is exact; min_squares witnesses the three squared distances at
    one minimizer; certified means the expanding-shell search proved that no
    vertex outside the reported set can attain the minimum.
    """

    min_value: SqrtSum
    min_squares: tuple
    min_vertices: frozenset
    search_radius: int
    certified: bool

    def enclosure(self, digits=20):
        return self.min_value.enclosure(digits)


_LIPSCHITZ_MARGIN = SqrtSum.sqrt_int(3)  # 3-Lipschitz sum x covering radius 1/sqrt(3)
_TWO = SqrtSum.of_squares((4,))


def _certified_apartment_min(value_at, radius_cap):
    """Certified minimum of a convex vertex function on one apartment.

    Expanding triangular-lattice shells around a greedily improved center;
    the search stops once the two outermost shells lie entirely above the
    best value plus sqrt(3).  Convexity then forbids a better vertex outside:
    a geodesic from an interior minimizer to it would cross the annulus at a
    point whose nearest lattice vertex (within covering radius 1/sqrt(3) of
    the 3-Lipschitz function) would contradict the shell bound.
    """
    cur = (0, 0)
    best = value_at(cur)
    moves = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1))
    improved = True
    while improved and not best.is_zero():
        improved = False
        for mv in moves:
            cand = (cur[0] + mv[0], cur[1] + mv[1])
            v = value_at(cand)
            if v < best:
                cur, best, improved = cand, v, True
                break
    center = cur
    best = value_at(center)
    best_set = {center}
    shells_above = 0
    radius = 0
    certified = False
    while radius < radius_cap:
        radius += 1
        shell = [(i, j) for (i, j) in _eisenstein_ball(radius * radius)
                 if (radius - 1) ** 2 < i * i - i * j + j * j]
        threshold = best + _LIPSCHITZ_MARGIN
        all_above = True
        for (i, j) in shell:
            m = (center[0] + i, center[1] + j)
            v = value_at(m)
            cmp = v.compare(best)
            if cmp < 0:
                best, best_set = v, {m}
                threshold = best + _LIPSCHITZ_MARGIN
                all_above = False
            elif cmp == 0:
                best_set.add(m)
                all_above = False
            elif v.compare(threshold) <= 0:
                all_above = False
        shells_above = shells_above + 1 if all_above else 0
        if shells_above >= 2:
            certified = True
            break
    return best, best_set, radius, certified


def barycenter(triple, p, radius_cap=12):
    """Vertex minimizers of the apartment-distance sum, exactly and certified.

    Any vertex with value less than 2 lies on at least one of the three pair
    apartments (the squared distances are integers, and a vertex off an
    apartment contributes at least 1 from it), so a certified in-apartment
    search on each of the three apartments determines the global vertex
    minimum whenever that minimum is at most 2, which genericity guarantees
    in practice.  Returns the full minimizing vertex set; no tie-break is
    applied, keeping the set exactly equivariant.
    """
    if not is_generic(triple):
        raise ValueError("barycenter requires a generic triple")
    frames = pairwise_frames(triple)
    overall_best = None
    overall_vertices = {}
    radius = 0
    all_certified = True
    for k, frame in enumerate(frames):
        others = [frames[i] for i in range(3) if i != k]
        ev_a = ApartmentPairDistance(frame, others[0], p)
        ev_b = ApartmentPairDistance(frame, others[1], p)

        def value_at(m, _ea=ev_a, _eb=ev_b):
            mm = (m[0], m[1], 0)
            return SqrtSum.of_squares((_ea.dist2_to_apartment(mm),
                                       _eb.dist2_to_apartment(mm)))

        best, best_set, rad, cert = _certified_apartment_min(value_at, radius_cap)
        radius = max(radius, rad)
        all_certified &= cert
        cmp = -1 if overall_best is None else best.compare(overall_best)
        if cmp < 0:
            overall_best = best
            overall_vertices = {}
        if cmp <= 0:
            for m in best_set:
                v = frame_vertex(frame, p, (m[0], m[1], 0))
                overall_vertices.setdefault(v, (k, m))
    certified = all_certified and overall_best.compare(_TWO) <= 0
    k, m = next(iter(overall_vertices.values()))
    ev = [ApartmentPairDistance(frames[k], frames[i], p) for i in range(3) if i != k]
    q_others = [e.dist2_to_apartment((m[0], m[1], 0)) for e in ev]
    squares = [0, 0, 0]
    slot = 0
    for i in range(3):
        if i == k:
            squares[i] = 0
        else:
            squares[i] = q_others[slot]
            slot += 1
    return BarycenterResult(overall_best, tuple(squares),
                            frozenset(overall_vertices), radius, certified)


# ---------------------------------------------------------------------------
# genericity density
# ---------------------------------------------------------------------------

def genericity_rate(c1, c2, trials, depth, rng, p, base=None):
    """Fraction of harmonic-sampled completions that land in generic position."""
    if not is_opposite(c1, c2):
        raise NotOppositeError("genericity_rate requires opposite chambers")
    from .stochastics import harmonic_sample
    x = base if base is not None else LatticeVertex.standard(p)
    hits = 0
    for _ in range(trials):
        c3 = harmonic_sample(x, depth, rng)
        if c3 != c1 and c3 != c2 and is_generic(ChamberTriple.of(c1, c2, c3)):
            hits += 1
    return Fraction(hits, trials)


def generic_triple_in_basis_set(x, y, rng, depth=6, max_draws=100):
    """A generic triple drawn entirely inside the basis set U_x(y).

    Draws conditioned harmonic samples; returns (triple, draws) on success
    and None after max_draws failures.
    """
    from .stochastics import harmonic_sample_in_basis_set
    for attempt in range(1, max_draws + 1):
        c1 = harmonic_sample_in_basis_set(x, y, depth, rng)
        c2 = harmonic_sample_in_basis_set(x, y, depth, rng)
        c3 = harmonic_sample_in_basis_set(x, y, depth, rng)
        if len({c1, c2, c3}) != 3:
            continue
        triple = ChamberTriple.of(c1, c2, c3)
        if is_generic(triple):
            return triple, attempt
    return None
