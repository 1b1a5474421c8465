"""An explicit one-parameter family of Borel subgroups of SL3 in generic position.

Fix the upper-triangular Borel P (flag <e1> < <e1,e2>), the lower-triangular
Borel P' (flag <e3> < <e2,e3>), and for a scalar t the Borel P^t stabilizing
the flag <v> < V_t with v = e1 + e2 + e3 and V_t the plane
-t*x + (1+t)*y - z = 0.  The triple of flags of (P, P', P^t) is in generic
position for every t outside {0, -1}; at t = 0 the plane V_0 contains e1 (so
P and P^0 are not transverse) and at t = -1 it contains e2 (so the three pair
apartments share the ideal vertex <e2>).

The diagonalizable subgroup P meet P^1 is the two-parameter matrix family
A_(a,e) below; (a, e) -> A_(a,e) is a group homomorphism and each member
stabilizes both defining flags.  Everything here is exact, over Q by default
with small finite fields available for exhaustive cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .padic_linalg import det3, dot, from_columns, mat_vec
from .boundary import Flag, apartment_from_opposite, is_opposite
from .triples import (
    ChamberTriple,
    apartment_ideal_simplices,
    is_generic,
)
from .fields import FiniteField


SPAN_VECTOR = (1, 1, 1)


def family_plane_normal(t):
    """Normal vector of V_t = {-t*x + (1+t)*y - z = 0}."""
    t = Fraction(t)
    return (-t, 1 + t, Fraction(-1))


def upper_flag():
    """The flag <e1> < <e1, e2> stabilized by the upper-triangular Borel."""
    return Flag.standard()


def lower_flag():
    """The flag <e3> < <e2, e3> stabilized by the lower-triangular Borel."""
    return Flag.reversed_standard()


def family_flag(t):
    """The flag <v> < V_t of the parameter-t Borel; degenerate t still gives a flag."""
    n = family_plane_normal(t)
    v = SPAN_VECTOR
    if dot(n, v) != 0:
        raise AssertionError("v must lie on V_t for every t")
    # complete v to a basis of the plane (any kernel vector not on <v> works,
    # and v has no zero coordinate while the kernel vector below has one)
    k = next(i for i, e in enumerate(n) if e != 0)
    j = (k + 1) % 3
    second = tuple(n[k] if i == j else (-n[j] if i == k else 0) for i in range(3))
    for third in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
        m = from_columns((v, second, third))
        if det3(m) != 0:
            return Flag.from_matrix(m)
    raise AssertionError("flag completion failed")


def torus_family_member(a, e):
    """The matrix A_(a,e) of the diagonalizable group P meet P^1.

    Requires a*e != 0; the member has determinant 1 and stabilizes both the
    upper flag and the t = 1 family flag.  (a, e) -> A_(a,e) is a
    homomorphism from the multiplicative group of pairs.
    """
    a, e = Fraction(a), Fraction(e)
    if a * e == 0:
        raise ValueError("parameters must be nonzero")
    i = 1 / (a * e)
    m = ((a, 2 * e - 2 * a, i - 2 * e + a),
         (0, e, i - e),
         (0, 0, i))
    if det3(m) != 1:
        raise AssertionError("family member must have determinant 1")
    if not (stabilizes_flag(m, upper_flag()) and stabilizes_flag(m, family_flag(1))):
        raise AssertionError("family member must stabilize both defining flags")
    return m


def lower_torus_member(a, e):
    """The lower-triangular analogue inside P' meet P^1."""
    a, e = Fraction(a), Fraction(e)
    if a * e == 0:
        raise ValueError("parameters must be nonzero")
    i = 1 / (a * e)
    m = ((a, 0, 0),
         (a - e, e, 0),
         (a - 2 * e + i, 2 * e - 2 * i, i))
    if det3(m) != 1:
        raise AssertionError("family member must have determinant 1")
    return m


# ---------------------------------------------------------------------------
# stabilization predicates
# ---------------------------------------------------------------------------

def stabilizes_line(m, v):
    w = mat_vec(m, v)
    return all(w[i] * v[j] == w[j] * v[i] for i in range(3) for j in range(3))


def stabilizes_plane(m, normal):
    # the plane is stable iff the inverse-transpose fixes its normal line;
    # equivalently m maps two spanning vectors back into the plane
    k = next(i for i, e in enumerate(normal) if e != 0)
    basis = []
    for i in range(3):
        if i != k:
            vec = tuple(normal[k] if r == i else (-normal[i] if r == k else 0)
                        for r in range(3))
            basis.append(vec)
    return all(dot(normal, mat_vec(m, b)) == 0 for b in basis)


def stabilizes_flag(m, flag):
    return stabilizes_line(m, flag.line) and stabilizes_plane(m, flag.plane_normal)


STANDARD_APARTMENT_SIMPLICES = (
    ("line", (1, 0, 0)), ("line", (0, 1, 0)), ("line", (0, 0, 1)),
    ("plane", (0, 0, 1)), ("plane", (0, 1, 0)), ("plane", (1, 0, 0)),
    ("chamber", ((1, 0, 0), (0, 0, 1))),   # <e1> < <e1,e2>
    ("chamber", ((1, 0, 0), (0, 1, 0))),   # <e1> < <e1,e3>
    ("chamber", ((0, 1, 0), (0, 0, 1))),   # <e2> < <e1,e2>
    ("chamber", ((0, 1, 0), (1, 0, 0))),   # <e2> < <e2,e3>
    ("chamber", ((0, 0, 1), (0, 1, 0))),   # <e3> < <e1,e3>
    ("chamber", ((0, 0, 1), (1, 0, 0))),   # <e3> < <e2,e3>
)


def stabilized_apartment_simplices(m):
    """Labels of the standard-apartment ideal simplices stabilized by m.

    The twelve simplices are the coordinate lines, the coordinate planes
    (named by their normals) and the six coordinate chambers given as
    (line, plane normal) pairs.
    """
    out = []
    for kind, data in STANDARD_APARTMENT_SIMPLICES:
        if kind == "line" and stabilizes_line(m, data):
            out.append((kind, data))
        elif kind == "plane" and stabilizes_plane(m, data):
            out.append((kind, data))
        elif kind == "chamber":
            line, normal = data
            if stabilizes_line(m, line) and stabilizes_plane(m, normal):
                out.append((kind, data))
    return frozenset(out)


# ---------------------------------------------------------------------------
# position reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PairPosition:
    pair: tuple
    opposite: bool
    # for opposite pairs: common ideal simplices of this pair's apartment
    # with the apartment of the base opposite pair
    intersection_with_base: object | None


@dataclass(frozen=True)
class PositionReport:
    t: object
    pairs: tuple
    line_in_plane_witnesses: tuple
    generic: bool


def pairwise_position_report(t):
    """Oppositions and apartment intersections for the parameter-t triple.

    The base pair is (upper, lower); for each pair involving the family flag
    the report includes the exact common ideal simplices of its apartment
    with the base apartment.  Degeneracies come with witnesses: e1 lies on
    V_0 and e2 lies on V_(-1).
    """
    t = Fraction(t)
    cu, cl, cf = upper_flag(), lower_flag(), family_flag(t)
    base_frame = apartment_from_opposite(cu, cl)
    base_simplices = apartment_ideal_simplices(base_frame)
    pairs = []
    for name, a, b in (("upper,lower", cu, cl),
                       ("upper,family", cu, cf),
                       ("lower,family", cl, cf)):
        opp = is_opposite(a, b)
        inter = None
        if opp and name != "upper,lower":
            frame = apartment_from_opposite(a, b)
            inter = apartment_ideal_simplices(frame).intersection(base_simplices)
        elif opp:
            inter = base_simplices
        pairs.append(PairPosition((name,), opp, inter))
    n = family_plane_normal(t)
    witnesses = (("e1_on_plane", dot(n, (1, 0, 0)) == 0),
                 ("e2_on_plane", dot(n, (0, 1, 0)) == 0),
                 ("e3_on_plane", dot(n, (0, 0, 1)) == 0))
    generic = False
    if all(pp.opposite for pp in pairs):
        generic = is_generic(ChamberTriple.of(cu, cl, cf))
    return PositionReport(t, tuple(pairs), witnesses, generic)


def generic_family_scan(t_values):
    """Genericity verdict of the flag triple for each parameter."""
    return {t: pairwise_position_report(t).generic for t in t_values}


# ---------------------------------------------------------------------------
# finite-field cross checks
# ---------------------------------------------------------------------------

def torus_members_field(field):
    """All A_(a,e) over a finite field; empty in characteristic 2 at t = 1.

    In characteristic 2 the parameter t = 1 equals -1, which is excluded from
    the generic range, so the family is only enumerated for odd q.
    """
    if field.q % 2 == 0:
        raise ValueError("t = 1 is degenerate in characteristic 2")
    out = []
    for a in field.units():
        for e in field.units():
            i = field.inv(field.mul(a, e))
            two_e = field.add(e, e)
            two_a = field.add(a, a)
            m = ((a, field.sub(two_e, two_a),
                  field.sub(field.add(i, a), two_e)),
                 (0, e, field.sub(i, e)),
                 (0, 0, i))
            out.append(m)
    return out


def _field_flag_stab(field, m, line, plane_points):
    w = field.mat_vec(m, line)
    if not field.proportional(w, line):
        return False
    for b in plane_points:
        img = field.mat_vec(m, b)
        # membership in the span of plane_points: rank stays 2
        m3 = (plane_points[0], plane_points[1], img)
        if field.det3(tuple(zip(*m3))) != 0:
            return False
    return True


def upper_borel_intersection_count_field(q):
    """Exhaustive size of P meet P^1 over F_q (odd q), for comparison with (q-1)^2.

    Enumerates the upper-triangular subgroup and keeps the elements
    stabilizing the t = 1 family flag.
    """
    field = FiniteField(q)
    if q % 2 == 0:
        raise ValueError("t = 1 is degenerate in characteristic 2")
    v = (1, 1, 1)
    # V_1 over F_q: -x + 2y - z = 0; points v and (2, 1, 0)
    plane_points = (v, (2 % q, 1, 0))
    count = 0
    for a in field.units():
        for e in field.units():
            i = field.inv(field.mul(a, e))
            for b in field.elements():
                for c in field.elements():
                    for f in field.elements():
                        m = ((a, b, c), (0, e, f), (0, 0, i))
                        if _field_flag_stab(field, m, v, plane_points):
                            count += 1
    return count
