"""Independent brute-force oracles used to validate the library's fast paths.

Each oracle deliberately avoids the code path it checks: Smith exponents come
from minor gcds instead of elimination, relative position from trying all six
permutations against the rank table, sector membership from enumerating the
sector's vertices, and residue alcoves from a first-step neighbor search.
"""

from fractions import Fraction
from itertools import permutations

from sl3building.padic_linalg import (
    adjugate3,
    columns,
    det3,
    flag_adapted_basis,
    from_columns,
    integerize,
    mat_inv3,
    mat_mul,
    rank,
    valuation,
    valuation_int,
)
from sl3building.building import (
    LatticeVertex,
    ResidueChamber,
    canonical_modp_vector,
    dist2,
    frame_vertex,
    residue_lines,
    vector_distance,
    weyl_dist2,
)
from sl3building.boundary import Flag


def smith_minor_gcd_oracle(m, p):
    """Smith exponents via gcd valuations of the k x k minors.

    The sum of the k smallest exponents equals the minimal valuation over all
    k x k minors; this inverts to the descending exponent triple.
    """
    m_int, den = integerize(m)
    shift = valuation_int(den, p) if den != 1 else 0
    e1 = min(valuation_int(e, p) for row in m_int for e in row if e != 0)
    best2 = None
    idx = ((0, 1), (0, 2), (1, 2))
    for r1, r2 in idx:
        for c1, c2 in idx:
            minor = m_int[r1][c1] * m_int[r2][c2] - m_int[r1][c2] * m_int[r2][c1]
            if minor != 0:
                v = valuation_int(minor, p)
                best2 = v if best2 is None else min(best2, v)
    e3 = valuation_int(det3(m_int), p)
    a3, a2, a1 = e1, best2 - e1, e3 - best2
    return tuple(sorted((a1 - shift, a2 - shift, a3 - shift), reverse=True))


def weyl_distance_oracle(c, d):
    """The unique permutation matching the full intersection-dimension table."""
    ccols = columns(c.matrix)
    dcols = columns(d.matrix)
    dims = {}
    for i in range(1, 4):
        for j in range(1, 4):
            stacked = from_columns(ccols[:i] + dcols[:j])
            dims[(i, j)] = i + j - rank(stacked)
    matches = []
    for w in permutations(range(3)):
        if all(dims[(i, j)] == sum(1 for a in range(i) if w[a] < j)
               for i in range(1, 4) for j in range(1, 4)):
            matches.append(w)
    assert len(matches) == 1, f"dimension table matched {len(matches)} permutations"
    return matches[0]


def sector_vertices_bfs(x, c, radius):
    """All vertices of the sector from x toward c within CAT(0) radius.

    Enumerates the adapted-basis diagonal lattices with ascending exponent
    triples of bounded length; returns their canonical matrices as a set.
    """
    p = x.p
    g = mat_mul(mat_inv3(x.matrix), c.matrix)
    h = flag_adapted_basis(g, p)
    base = mat_mul(x.matrix, h)
    out = set()
    r2 = radius * radius
    bound = radius + 1
    for m2 in range(0, bound + 1):
        for m3 in range(m2, 2 * bound + 1):
            if weyl_dist2((m3, m2, 0)) <= r2:
                cols = columns(base)
                scaled = (cols[0],
                          tuple(e * p ** m2 for e in cols[1]),
                          tuple(e * p ** m3 for e in cols[2]))
                out.add(LatticeVertex.from_matrix(p, from_columns(scaled)).matrix)
    return out


def sector_membership_oracle(x, c, y, radius):
    """Membership by exhaustive sector enumeration; valid when d(x, y) <= radius."""
    assert dist2(x, y) <= radius * radius, "oracle radius too small"
    return y.matrix in sector_vertices_bfs(x, c, radius)


def _neighbor_vertices(o):
    """The vertices adjacent to o, keyed by their mod-p datum.

    A line neighbor is spanned by a lift of the line plus p times the other
    basis directions; a plane neighbor by lifts of two kernel vectors of the
    normal plus p times the unit-coordinate basis direction.
    """
    p = o.p
    cols = columns(o.matrix)
    scaled = [tuple(p * e for e in col) for col in cols]

    def lift(vec):
        return tuple(sum(vec[k] * cols[k][r] for k in range(3)) for r in range(3))

    lines = {}
    planes = {}
    for vec in residue_lines(p):
        k = next(i for i in range(3) if vec[i] % p != 0)
        others = [i for i in range(3) if i != k]
        lines[vec] = LatticeVertex.from_matrix(
            p, from_columns((lift(vec), scaled[others[0]], scaled[others[1]])))
        kern = []
        for i in others:
            w = tuple(vec[k] if r == i else (-vec[i] if r == k else 0)
                      for r in range(3))
            kern.append(lift(w))
        planes[vec] = LatticeVertex.from_matrix(
            p, from_columns((kern[0], kern[1], scaled[k])))
    return lines, planes


def residue_projection_oracle(o, y):
    """Germ alcove of [o, y] from the first geodesic step among neighbors.

    The line part is the line-type neighbor strictly closest to y, the plane
    part the plane-type neighbor strictly closest to y; for a regular segment
    both minimizers are unique and assemble to the germ alcove.
    """
    lines, planes = _neighbor_vertices(o)

    def unique_argmin(cands):
        best_val, best_key, tie = None, None, False
        for key, v in cands.items():
            q = dist2(v, y)
            if best_val is None or q < best_val:
                best_val, best_key, tie = q, key, False
            elif q == best_val:
                tie = True
        assert not tie, "geodesic first step is ambiguous; segment not regular?"
        return best_key

    line = unique_argmin(lines)
    normal = unique_argmin(planes)
    return ResidueChamber.from_parts(o.p, line, normal)


def distance_to_apartment_bruteforce(x, frame, window):
    """Slow minimum of d(x, apartment vertex) over an exponent window."""
    best = None
    for m1 in range(-window, window + 1):
        for m2 in range(-window, window + 1):
            v = frame_vertex(frame, x.p, (m1, m2, 0))
            q = dist2(x, v)
            if best is None or q < best:
                best = q
    return best


def residue_opposite_chamber_count(p):
    """Number of residue alcoves opposite a fixed one: p^3 for the A2 flag complex."""
    from sl3building.building import residue_chambers, residue_opposite
    chambers = residue_chambers(p)
    fixed = chambers[0]
    return sum(1 for c in chambers if residue_opposite(fixed, c))
