"""Hyperbolic dynamics on the chambers at infinity.

Strongly regular hyperbolic (SRH) elements of SL3(Q) are axial isometries of
the building whose translation apartment is regular; they carry an attracting
and a repelling ideal chamber and contract the big cell toward the attracting
one.  Certification works over Q: an element is accepted when its
characteristic polynomial has three rational eigenvalues with pairwise
distinct p-adic valuations, found by Newton-polygon slopes plus Hensel
lifting, so nothing is ever misclassified by numerics.

The module also provides the word-enumeration approximation of the flag limit
set, Schubert-cell classification of samples, and the sector-based
equicontinuity machinery (the sets of group elements pulling the base vertex
into closed sectors opposite a residue alcove).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .padic_linalg import (
    adjugate3,
    cross,
    det3,
    from_columns,
    identity,
    mat_inv3,
    mat_mul,
    primitive_vector,
    require_prime,
    valuation,
    valuation_int,
)
from .building import (
    LatticeVertex,
    canonical_modp_vector,
    Frame,
    dist2,
    dominant,
    frame_vertex,
    germ_face,
    is_colinear_growth,
    is_regular,
    residue_chambers,
    residue_opposite,
    residue_projection,
    ResidueChamber,
    vector_distance,
)
from .boundary import (
    ALL_PERMS,
    Flag,
    HorizonExceededError,
    apartment_chambers,
    common_depth,
    growth_ray_vertex,
    is_opposite,
    sector_membership,
    weyl_distance,
)


@dataclass(frozen=True)
class GroupElement:
    """Element of SL3(Q) acting on the building, with an optional word."""

    matrix: tuple
    word: tuple = None

    def __post_init__(self):
        if det3(self.matrix) != 1:
            raise ValueError("group elements must have determinant exactly 1")

    @classmethod
    def from_matrix(cls, m, word=None):
        return cls(tuple(tuple(Fraction(e) for e in row) for row in m),
                   tuple(word) if word is not None else None)

    def inverse(self):
        # det = 1, so the inverse is the adjugate
        w = tuple(-i for i in reversed(self.word)) if self.word else None
        return GroupElement.from_matrix(adjugate3(self.matrix), word=w)

    def __mul__(self, other):
        w = None
        if self.word is not None and other.word is not None:
            w = self.word + other.word
        return GroupElement.from_matrix(mat_mul(self.matrix, other.matrix), word=w)

    def power(self, n):
        if n < 0:
            return self.inverse().power(-n)
        out = GroupElement.from_matrix(identity())
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out


@dataclass(frozen=True)
class SrhRejection:
    """Why an element is not certified strongly regular hyperbolic."""

    reason: str  # "irrational spectrum" | "repeated valuation" | "not hyperbolic"

    def __bool__(self):
        return False


@dataclass(frozen=True)
class SrhCertificate:
    """Certified strongly regular hyperbolic element.

    ``lines`` are the eigenlines ordered by increasing eigenvalue valuation,
    so the first line is the attracting direction.  ``lam`` is the dominant
    translation vector.
    """

    p: int
    element: GroupElement
    lines: tuple
    lam: tuple
    attracting: Flag
    repelling: Flag

    def __bool__(self):
        return True

    @property
    def frame(self):
        return Frame.from_lines(self.lines)

    def base_vertex(self):
        return frame_vertex(self.frame, self.p, (0, 0, 0))

    def conjugate(self, k):
        """Certificate of k g k^-1, transported field by field."""
        kinv = mat_inv3(k.matrix) if isinstance(k, GroupElement) else mat_inv3(k)
        km = k.matrix if isinstance(k, GroupElement) else k
        g = GroupElement.from_matrix(mat_mul(km, mat_mul(self.element.matrix, kinv)))
        lines = tuple(primitive_vector(tuple(sum(row[i] * v[i] for i in range(3))
                                             for row in km)) for v in self.lines)
        return SrhCertificate(self.p, g, lines, self.lam,
                              self.attracting.apply(km), self.repelling.apply(km))


# ---------------------------------------------------------------------------
# certification
# ---------------------------------------------------------------------------

def _newton_root_valuations(coeffs, p):
    """Root valuations of a polynomial over Q_p from its Newton polygon.

    coeffs = (c0, ..., cn) with c0, cn != 0.  Each lower-hull segment of
    slope s contributes (length) roots of valuation -s.  Returns the list of
    valuations as Fractions, in increasing order.
    """
    pts = [(i, Fraction(valuation(Fraction(c), p)))
           for i, c in enumerate(coeffs) if c != 0]
    hull = [pts[0]]
    for pt in pts[1:]:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (pt[1] - y1) * (x2 - x1) <= (y2 - y1) * (pt[0] - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    vals = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slope = Fraction(y2 - y1, x2 - x1)
        vals.extend([-slope] * (x2 - x1))
    return sorted(vals)


def _hensel_integer_root(b2, b1, b0, p, w):
    """The integer root of y^3 + b2 y^2 + b1 y + b0 with valuation w, if any.

    w must be a multiplicity-one Newton slope, so the substitution y = p^w z
    turns the sought root into a simple unit root mod p; that seed lifts by
    Newton iteration with a unit derivative.  The result is verified exactly,
    so irrational p-adic roots come back as None and nothing is guessed.
    """
    def f(y):
        return ((y + b2) * y + b1) * y + b0

    pw = p ** w
    c3, c2, c1, c0 = pw ** 3, b2 * pw ** 2, b1 * pw, b0
    shift = min(valuation_int(c, p) for c in (c3, c2, c1, c0) if c != 0)
    g3, g2, g1, g0 = (c // p ** shift for c in (c3, c2, c1, c0))

    def g(z):
        return ((g3 * z + g2) * z + g1) * z + g0

    def gp(z):
        return (3 * g3 * z + 2 * g2) * z + g1

    seed = next((r for r in range(1, p) if g(r) % p == 0), None)
    if seed is None or gp(seed) % p == 0:
        return None
    bound = 1 + max(abs(b2), abs(b1), abs(b0))  # Cauchy bound, monic cubic
    z, q = seed, p
    while q <= 2 * bound:
        q = q * q
        z = (z - g(z) * pow(gp(z), -1, q)) % q
    cand = z if z <= q // 2 else z - q
    y = pw * cand
    return y if f(y) == 0 else None


def _rational_eigenvalues_distinct_valuations(g, p):
    """Eigenvalues of g (det 1) when rational with pairwise distinct valuations.

    Returns a list of three Fractions sorted by increasing valuation, or an
    SrhRejection.  Only the distinct-valuation case is resolved; everything
    else is rejected with the appropriate reason.
    """
    m = g.matrix
    tr = sum(m[i][i] for i in range(3))
    sec = sum(m[i][i] * m[j][j] - m[i][j] * m[j][i]
              for i in range(3) for j in range(i + 1, 3))
    # char poly x^3 - tr x^2 + sec x - 1; clear denominators via y = den * x
    den = Fraction(tr).denominator
    den = den * Fraction(sec).denominator // gcd(den, Fraction(sec).denominator)
    b2 = int(-tr * den)
    b1 = int(sec * den * den)
    b0 = -den ** 3
    vals = _newton_root_valuations((b0, b1, b2, 1), p)
    if any(v.denominator != 1 for v in vals):
        return SrhRejection("irrational spectrum")
    vals = [int(v) for v in vals]
    if len(set(vals)) < 3:
        if vals[0] == vals[2]:
            return SrhRejection("not hyperbolic")
        return SrhRejection("repeated valuation")
    roots = []
    for w in vals:
        y = _hensel_integer_root(b2, b1, b0, p, w)
        if y is None:
            return SrhRejection("irrational spectrum")
        roots.append(Fraction(y, den))
    if roots[0] * roots[1] * roots[2] != 1 or \
            any(_char_value(m, r) != 0 for r in roots):
        return SrhRejection("irrational spectrum")
    return roots


def _char_value(m, x):
    tr = sum(m[i][i] for i in range(3))
    sec = sum(m[i][i] * m[j][j] - m[i][j] * m[j][i]
              for i in range(3) for j in range(i + 1, 3))
    return x ** 3 - tr * x ** 2 + sec * x - 1


def _eigenline(m, lam):
    """Primitive vector spanning ker(m - lam), for a simple eigenvalue."""
    a = tuple(tuple(Fraction(m[i][j]) - (lam if i == j else 0) for j in range(3))
              for i in range(3))
    rows = [a[0], a[1], a[2]]
    for i in range(3):
        for j in range(i + 1, 3):
            w = cross(rows[i], rows[j])
            if any(e != 0 for e in w):
                return primitive_vector(w)
    raise ValueError("eigenspace is not one-dimensional")


def certify_srh(g, p):
    """Certificate that g is strongly regular hyperbolic, or a typed rejection.

    Accepts exactly the elements with three rational eigenvalues of pairwise
    distinct p-adic valuations.  The translation vector is the dominant
    arrangement of the valuations; the attracting chamber is the flag of the
    eigenlines in increasing valuation order.
    """
    require_prime(p)
    roots = _rational_eigenvalues_distinct_valuations(g, p)
    if isinstance(roots, SrhRejection):
        return roots
    roots = sorted(roots, key=lambda r: valuation(r, p))
    lines = tuple(_eigenline(g.matrix, r) for r in roots)
    vals = [valuation(r, p) for r in roots]
    lam = dominant(tuple(vals))
    attracting = Flag.from_matrix(from_columns(lines))
    repelling = Flag.from_matrix(from_columns(tuple(reversed(lines))))
    return SrhCertificate(p, g, lines, lam, attracting, repelling)


def make_srh(frame_or_lines, lam, p):
    """Build the SRH element translating a given apartment by a regular vector.

    The first line (of an ordered triple, or of a Frame's canonical order)
    becomes the attracting direction.  SL3 constrains the translation vector:
    lam = (a1, a2, 0) is realizable with determinant exactly 1 iff
    a1 + a2 is divisible by 3.
    """
    require_prime(p)
    if not is_regular(lam):
        raise ValueError("translation vector must be regular")
    if (lam[0] + lam[1]) % 3 != 0:
        raise ValueError("lam[0] + lam[1] must be divisible by 3 to realize "
                         "the translation in SL3")
    lines = frame_or_lines.lines if isinstance(frame_or_lines, Frame) \
        else tuple(primitive_vector(v) for v in frame_or_lines)
    s = (lam[0] + lam[1]) // 3
    exps = (-s, lam[1] - s, lam[0] - s)  # ascending, sum 0
    h = from_columns(lines)
    hinv = mat_inv3(h)
    d = tuple(tuple(Fraction(p) ** exps[i] if i == j else 0 for j in range(3))
              for i in range(3))
    g = GroupElement.from_matrix(mat_mul(h, mat_mul(d, hinv)))
    attracting = Flag.from_matrix(from_columns(lines))
    repelling = Flag.from_matrix(from_columns(tuple(reversed(lines))))
    return SrhCertificate(p, g, lines, lam, attracting, repelling)


# ---------------------------------------------------------------------------
# north-south dynamics
# ---------------------------------------------------------------------------

def _apartment_candidate(chambers, flag, base, threshold):
    best = None
    for e in chambers:
        de = common_depth(flag, e, base, threshold + 1)
        if de >= threshold and (best is None or de > best[1]):
            best = (e, de)
    return best


def _stable_apartment_direction(cert, flags_sequence, threshold, nmax, base):
    """Common stabilization detector for power iterations.

    flags_sequence yields successive image flags; convergence is declared
    when the agreement depth of successive images is nondecreasing and at
    least threshold for three consecutive steps, and the apartment chamber
    read off at that point is confirmed at roughly twice the step count
    (iteration paths are piecewise straight, so a transient leg that fooled
    the run rule fails the doubled confirmation).
    """
    chambers = apartment_chambers(cert.frame)
    prev = None
    prev_depth = -1
    run = 0
    candidate = None
    confirm_at = None
    trajectory = []
    for n, flag in enumerate(flags_sequence, start=1):
        if prev is not None:
            d = common_depth(prev, flag, base, threshold + 1)
            trajectory.append((n, d))
            if d >= threshold and d >= prev_depth:
                run += 1
            else:
                run = 0
            prev_depth = d
            if candidate is None and run >= 3:
                best = _apartment_candidate(chambers, flag, base, threshold)
                if best is not None:
                    candidate = best[0]
                    confirm_at = 2 * n + 2
                else:
                    run = 0
            elif candidate is not None and n >= confirm_at:
                best = _apartment_candidate(chambers, flag, base, threshold)
                if best is not None and best[0] == candidate:
                    return candidate
                candidate, confirm_at, run = None, None, 0
        prev = flag
        if n >= nmax:
            break
    raise HorizonExceededError("iteration did not stabilize before the horizon",
                               trajectory=trajectory)


def north_south_limit(cert, c, nmax=40, threshold=4):
    """Limit of the power iteration g^n c, certified by depth stabilization.

    The result always lies on the translation apartment and coincides with
    the boundary retraction onto that apartment centered at the repelling
    chamber; the two routes are independent and cross-checked in the tests.
    """
    for e in apartment_chambers(cert.frame):
        if e == c:
            return c
    base = cert.base_vertex()
    g = cert.element.matrix

    def images():
        cur = c
        while True:
            cur = cur.apply(g)
            yield cur

    return _stable_apartment_direction(cert, images(), threshold, nmax, base)


def proximal_pair_check(cert1, cert2):
    """Hypothesis of the universal contraction: cert2's repelling chamber is
    opposite every ideal chamber of cert1's translation apartment."""
    return all(is_opposite(cert2.repelling, d)
               for d in apartment_chambers(cert1.frame))


def universal_contraction(cert1, cert2, c, nmax=40, threshold=4):
    """Limit of g2^n g1^n c for a pair passing proximal_pair_check.

    The iteration contracts every ideal chamber to the attracting chamber of
    cert2.
    """
    if not proximal_pair_check(cert1, cert2):
        raise ValueError("pair does not satisfy the contraction hypothesis")
    base = cert2.base_vertex()
    g1 = cert1.element
    g2 = cert2.element

    def images():
        n = 1
        while True:
            w = g2.power(n) * g1.power(n)
            yield c.apply(w.matrix)
            n += 1

    return _stable_apartment_direction(cert2, images(), threshold, nmax, base)


# ---------------------------------------------------------------------------
# flag limit set samples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LimitSetSample:
    """Attracting chambers of certified SRH words up to a length bound."""

    flags: tuple
    word_bound: int
    witnesses: tuple  # pairs (flag, certificate)

    def __contains__(self, flag):
        return flag in set(self.flags)


def enumerate_reduced_words(generators, max_len):
    """Group elements of reduced words in the generators and their inverses.

    Words that cancel an immediately preceding letter are skipped and
    elements are deduplicated by their exact matrix.
    """
    alphabet = []
    for i, g in enumerate(generators):
        alphabet.append((i + 1, g))
        alphabet.append((-(i + 1), g.inverse()))
    seen = {identity(): GroupElement.from_matrix(identity(), word=())}
    frontier = [((), GroupElement.from_matrix(identity(), word=()))]
    for _ in range(max_len):
        nxt = []
        for word, elem in frontier:
            for letter, gen in alphabet:
                if word and word[-1] == -letter:
                    continue
                new_word = word + (letter,)
                new_elem = GroupElement.from_matrix(
                    mat_mul(elem.matrix, gen.matrix), word=new_word)
                if new_elem.matrix not in seen:
                    seen[new_elem.matrix] = new_elem
                nxt.append((new_word, new_elem))
        frontier = nxt
    return tuple(seen.values())


def limit_set_sample(generators, max_len, p):
    """Finite approximation of the flag limit set by word enumeration."""
    flags = {}
    for elem in enumerate_reduced_words(generators, max_len):
        cert = certify_srh(elem, p)
        if cert:
            flags.setdefault(cert.attracting, cert)
    return LimitSetSample(tuple(sorted(flags, key=lambda f: str(f.matrix))),
                          max_len, tuple(flags.items()))


def schubert_avoidance_report(sample, cert):
    """Which Schubert cells relative to the repelling chamber the sample meets."""
    if cert.attracting not in set(sample.flags):
        raise ValueError("certificate's attracting flag is not in the sample")
    hit = {w: False for w in ALL_PERMS}
    for f in sample.flags:
        hit[weyl_distance(cert.repelling, f)] = True
    return hit


def fixed_flag_fraction(g, trials, depth, rng, p, base=None):
    """Fraction of harmonic-sampled flags fixed exactly by g."""
    from .stochastics import harmonic_sample  # local import to avoid a cycle
    x = base if base is not None else LatticeVertex.standard(p)
    hits = 0
    for _ in range(trials):
        c = harmonic_sample(x, depth, rng)
        if c.apply(g.matrix) == c:
            hits += 1
    return Fraction(hits, trials)


# ---------------------------------------------------------------------------
# equicontinuity machinery
# ---------------------------------------------------------------------------

def _require_growth_vertex(o, y):
    lam = vector_distance(o, y)
    if not is_regular(lam):
        raise ValueError("y must be at a regular vector distance from o")
    if not is_colinear_growth(lam):
        raise ValueError("theta(o, y) must be colinear with the growth direction (2t, t, 0)")
    return lam


def equicontinuity_set_member(g, o, y):
    """Whether g pulls the base vertex into a closed sector opposite the alcove of y.

    The germ of [o, g^-1 o] may sit on a face; membership holds when some
    residue alcove containing that germ is opposite the alcove of [o, y].
    """
    _require_growth_vertex(o, y)
    c_y = residue_projection(o, y)
    z = o.apply(g.inverse().matrix)
    if z == o:
        return True
    line, normal = germ_face(o, z)
    p = o.p
    if line is not None and normal is not None:
        candidates = [ResidueChamber.from_parts(p, line, normal)]
    elif line is not None:
        ell = canonical_modp_vector(line, p)
        candidates = [c for c in residue_chambers(p) if c.line == ell]
    else:
        nn = canonical_modp_vector(normal, p)
        candidates = [c for c in residue_chambers(p) if c.plane_normal == nn]
    return any(residue_opposite(c, c_y) for c in candidates)


def equicontinuity_check(g, o, y, c, d):
    """Sector form of equicontinuity: images stay in a basis set at least as deep.

    For g in the equicontinuity set of y and chambers c, d in U_o(y), the
    images g c and g d must lie in U_o(y') with y' = g y and d(o, y') at
    least d(o, y).  This always holds; a False return indicates a bug.
    """
    if not equicontinuity_set_member(g, o, y):
        raise ValueError("g is not in the equicontinuity set of y")
    if not (sector_membership(o, c, y) and sector_membership(o, d, y)):
        raise ValueError("both chambers must lie in U_o(y)")
    y2 = y.apply(g.matrix)
    gc = c.apply(g.matrix)
    gd = d.apply(g.matrix)
    return (sector_membership(o, gc, y2)
            and sector_membership(o, gd, y2)
            and dist2(o, y2) >= dist2(o, y))


def partition_probe_set(o, frame):
    """One growth-ray vertex per alcove of the frame apartment at o."""
    out = []
    for e in apartment_chambers(frame):
        out.append(growth_ray_vertex(o, e, 1))
    return tuple(out)


def partition_check(generators, max_len, o, frame):
    """Every short word lies in the equicontinuity set of some probe vertex.

    The probe set has one growth-ray vertex per residue alcove of the frame
    apartment at o; the union of their equicontinuity sets is the whole
    group, so a False return indicates a bug.
    """
    probes = partition_probe_set(o, frame)
    for elem in enumerate_reduced_words(generators, max_len):
        if not any(equicontinuity_set_member(elem, o, y) for y in probes):
            return False
    return True
