"""Harmonic measures, random walks and strip growth.

The harmonic measure seen from a vertex x is the unique probability on
chambers at infinity invariant under the stabilizer of x; it gives every
cone-topology basis set U_x(y) mass 1/N, where N counts the vertices at the
same vector distance as y.  The sampler draws a uniformly random invertible
matrix modulo p^k in the stabilizer and pushes a base flag through it, which
reproduces that measure exactly on events of depth at most k.

Random walks multiply seeded generator choices and record, at every step, the
vector distance from the base vertex and the residue germ of the current
position; directional convergence is germ stabilization along the tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .padic_linalg import (
    det3,
    identity,
    integerize,
    mat_mul,
    mat_inv3,
    lattice_canonical,
    residue_germ_parts,
    smith_exponents,
    strip_p_content,
)
from .building import (
    LatticeVertex,
    ResidueChamber,
    dominant,
    is_regular,
)
from .boundary import (
    Flag,
    NotOppositeError,
    apartment_from_opposite,
    is_opposite,
    sector_membership,
)
from .rng import derive_seed, make_rng


class InsufficientConvergenceError(RuntimeError):
    """Raised when too few walk paths converge to estimate anything."""


# ---------------------------------------------------------------------------
# harmonic sampling
# ---------------------------------------------------------------------------

def _random_stabilizer_matrix(p, depth, rng):
    q = p ** depth
    while True:
        m = tuple(tuple(rng.randrange(q) for _ in range(3)) for _ in range(3))
        if det3(m) % p != 0:
            return m


def harmonic_sample(x, depth, rng):
    """A flag drawn from the depth-k discretization of the harmonic measure at x.

    Exact on events measurable at depth k; deeper events carry a truncation
    bias on the p^-k scale.
    """
    k = _random_stabilizer_matrix(x.p, depth, rng)
    return Flag.from_matrix(mat_mul(x.matrix, k))


def _sector_shape_matrix(p, depth, exps, rng):
    """Uniform stabilizer element preserving the ascending-exponent diagonal lattice.

    exps is ascending with exps[0] = 0; entry (i, j) below the diagonal must
    be divisible by p^(exps[i] - exps[j]).
    """
    q = p ** depth
    while True:
        rows = []
        for i in range(3):
            row = []
            for j in range(3):
                gap = exps[i] - exps[j]
                if gap > 0:
                    row.append(p ** gap * rng.randrange(q // p ** gap))
                else:
                    row.append(rng.randrange(q))
            rows.append(tuple(row))
        m = tuple(rows)
        if det3(m) % p != 0:
            return m


def harmonic_sample_in_basis_set(x, y, depth, rng):
    """A harmonic draw conditioned on the basis set U_x(y).

    In an adapted basis the lattice of y is diagonal with ascending
    exponents; the stabilizer elements keeping the sampled flag's sector
    through y form the subgroup sampled by _sector_shape_matrix, and pushing
    the adapted base flag through it realizes the conditioned measure exactly
    at the sampling depth.
    """
    from .padic_linalg import smith_left_transform
    p = x.p
    n = mat_mul(mat_inv3(x.matrix), y.matrix)
    left, exps = smith_left_transform(n, p)
    if depth <= exps[2] - exps[0]:
        raise ValueError("depth must exceed the exponent range of y")
    norm = tuple(e - exps[0] for e in exps)
    k = _sector_shape_matrix(p, depth, norm, rng)
    h = mat_mul(x.matrix, left)
    flag = Flag.from_matrix(mat_mul(h, k))
    return flag


def basis_set_mass_estimate(x, lam, trials, rng, depth=None):
    """Empirical harmonic mass of a basis set U_x(y) with theta(x, y) = lam.

    Uses the diagonal representative y and tests the sampled stabilizer
    element k directly: the sampled chamber's sector passes through y exactly
    when k^-1 maps the lattice of y onto an ascending diagonal lattice, and
    since det k is a unit the adjugate serves as the inverse.  The event is
    measurable at depth lam1 + lam2 + 1, where the discretized sampler
    reproduces the harmonic measure exactly, so deviations are purely
    binomial.  Integer arithmetic throughout.
    """
    from .building import dominant as _dominant
    lam = _dominant(lam)
    p = x.p
    if depth is None:
        depth = lam[0] + lam[1] + 1
    d_y = ((1, 0, 0), (0, p ** lam[1], 0), (0, 0, p ** lam[0]))
    from .padic_linalg import adjugate3, is_diagonal_ascending
    hits = 0
    for _ in range(trials):
        k = _random_stabilizer_matrix(p, depth, rng)
        n = mat_mul(adjugate3(k), d_y)
        if is_diagonal_ascending(lattice_canonical(n, p), p):
            hits += 1
    return Fraction(hits, trials)


def count_at_vector_distance(x, lam, cap=2_000_000):
    """Exact number of vertices at vector distance lam from x.

    Enumerates canonical upper-triangular lattice representatives below x
    with the right determinant valuation and filters by elementary divisors;
    this covers every vertex once because the canonical form is unique.
    """
    lam = dominant(lam)
    p = x.p
    total_exp = lam[0] + lam[1]
    if total_exp == 0:
        return 1
    count = 0
    work = 0
    for b0 in range(total_exp + 1):
        for b1 in range(total_exp + 1 - b0):
            b2 = total_exp - b0 - b1
            work += p ** (2 * b0) * p ** b1
            if work > cap:
                raise RuntimeError("enumeration cap exceeded")
            for t01 in range(p ** b0):
                for t02 in range(p ** b0):
                    for t12 in range(p ** b1):
                        m = ((p ** b0, t01, t02),
                             (0, p ** b1, t12),
                             (0, 0, p ** b2))
                        if dominant(smith_exponents(m, p)) == lam:
                            count += 1
    return count


# ---------------------------------------------------------------------------
# random walks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WalkConfig:
    """Seeded random walk setup.

    weights must be positive rationals summing to one; support admissibility
    (semigroup generation) is the caller's responsibility, but a deterministic
    single-generator walk is allowed and useful as a calibration case.
    """

    p: int
    generators: tuple
    weights: tuple
    steps: int
    seed: int
    base_vertex: LatticeVertex

    def __post_init__(self):
        if not self.generators:
            raise ValueError("walk needs at least one generator")
        if len(self.weights) != len(self.generators):
            raise ValueError("one weight per generator")
        ws = [Fraction(w) for w in self.weights]
        if any(w <= 0 for w in ws):
            raise ValueError("weights must all be positive")
        if sum(ws) != 1:
            raise ValueError("weights must sum to 1")

    def thresholds(self):
        ws = [Fraction(w) for w in self.weights]
        den = 1
        for w in ws:
            den = den * w.denominator // math.gcd(den, w.denominator)
        cum = []
        acc = 0
        for w in ws:
            acc += int(w * den)
            cum.append(acc)
        return den, cum


@dataclass(frozen=True)
class WalkStep:
    n: int
    letter: int  # generator index of the increment, -1 for the start record
    theta: tuple
    germ: ResidueChamber | None
    germ_run: int  # consecutive steps with this same germ, 0 when irregular


@dataclass(frozen=True)
class WalkTrace:
    config: WalkConfig
    steps: tuple
    final_position: LatticeVertex

    @property
    def final_theta(self):
        return self.steps[-1].theta


def _strip_content(m):
    g = 0
    for row in m:
        for e in row:
            g = math.gcd(g, e)
    if g in (0, 1):
        return m
    return tuple(tuple(e // g for e in row) for row in m)


def _position_record(n, letter, z_int, base, prev_germ, prev_run, p):
    rel = mat_mul(mat_mul(mat_inv3(base.matrix), z_int), base.matrix)
    rel_int, _ = integerize(rel)
    rel_int, _ = strip_p_content(rel_int, p)
    theta = dominant(smith_exponents(rel_int, p))
    germ = None
    run = 0
    if is_regular(theta):
        line, normal = residue_germ_parts(rel_int, p)
        if line is not None and normal is not None:
            germ = ResidueChamber.from_parts(p, line, normal)
            run = prev_run + 1 if germ == prev_germ else 1
    return WalkStep(n, letter, theta, germ, run)


def run_walk(config):
    """Deterministic seeded walk; the trace is a pure function of the config."""
    p = config.p
    rng = make_rng(config.seed)
    den, cum = config.thresholds()
    gens_int = []
    for g in config.generators:
        gi, _ = integerize(g.matrix)
        gens_int.append(gi)
    base = config.base_vertex
    z = identity()
    steps = [_position_record(0, -1, z, base, None, 0, p)]
    for n in range(1, config.steps + 1):
        r = rng.randrange(den)
        idx = next(i for i, c in enumerate(cum) if r < c)
        z = _strip_content(mat_mul(z, gens_int[idx]))
        prev = steps[-1]
        steps.append(_position_record(n, idx, z, base, prev.germ, prev.germ_run, p))
    final = LatticeVertex.from_matrix(p, mat_mul(z, base.matrix))
    return WalkTrace(config, tuple(steps), final)


def convergence_report(trace, window=3):
    """Directional convergence: regular type and constant residue germ on the tail.

    Returns (converged, stabilization_time, germ).  The detector requires the
    germ to exist and stay constant from some step n1 through the end of the
    trace, with a tail of at least `window` steps; n1 is the earliest such
    step.
    """
    steps = trace.steps
    if len(steps) < window + 1:
        return False, None, None
    last = steps[-1]
    if last.germ is None:
        return False, None, None
    run = last.germ_run
    if run < window:
        return False, None, None
    n1 = last.n - run + 1
    return True, n1, last.germ


def direction_estimate(base, z_vertex):
    """The ideal chamber whose sector at the base vertex contains the position.

    Defined for regular positions: the flag of the adapted basis ordered by
    increasing exponents.
    """
    from .padic_linalg import smith_left_transform
    p = base.p
    n = mat_mul(mat_inv3(base.matrix), z_vertex.matrix)
    left, exps = smith_left_transform(n, p)
    if not (exps[0] < exps[1] < exps[2]):
        return None
    return Flag.from_matrix(mat_mul(base.matrix, left))


@dataclass(frozen=True)
class EventEstimate:
    label: str
    frequency: Fraction
    radius_3sigma: float
    trials_used: int


def stationary_estimate(config, trials, events, min_converged=Fraction(1, 2),
                        window=3):
    """Empirical limit-direction masses of basis-set events over seeded trials.

    events is a sequence of (label, x, y) with U_x(y) the event.  Each trial
    runs an independent walk (seed derived from the config seed and the trial
    index), keeps it when the convergence detector fires, and classifies the
    estimated limit chamber against each event.
    """
    converged = 0
    hits = {label: 0 for label, _, _ in events}
    for t in range(trials):
        cfg = WalkConfig(config.p, config.generators, config.weights,
                         config.steps, derive_seed(config.seed, t),
                         config.base_vertex)
        trace = run_walk(cfg)
        ok, _, _ = convergence_report(trace, window)
        if not ok:
            continue
        chamber = direction_estimate(config.base_vertex, trace.final_position)
        if chamber is None:
            continue
        converged += 1
        for label, x, y in events:
            if sector_membership(x, chamber, y):
                hits[label] += 1
    if Fraction(converged, trials) < min_converged:
        raise InsufficientConvergenceError(
            f"only {converged}/{trials} walks converged")
    out = []
    for label, _, _ in events:
        f = Fraction(hits[label], converged)
        sigma = math.sqrt(float(f) * (1 - float(f)) / converged)
        out.append(EventEstimate(label, f, 3 * sigma, converged))
    return out


def estimates_agree(est1, est2):
    """Two-sample agreement within three binomial standard errors."""
    out = {}
    for a, b in zip(est1, est2):
        f1, f2 = float(a.frequency), float(b.frequency)
        pooled = (f1 * a.trials_used + f2 * b.trials_used) / (a.trials_used + b.trials_used)
        se = math.sqrt(max(pooled * (1 - pooled), 1e-12)
                       * (1 / a.trials_used + 1 / b.trials_used))
        out[a.label] = abs(f1 - f2) <= 3 * se + 1e-12
    return out


# ---------------------------------------------------------------------------
# strip growth
# ---------------------------------------------------------------------------

def strip_growth(c1, c2, r_max):
    """Vertex counts of the apartment spanned by an opposite pair, by radius.

    Returns a list of (R, count of apartment vertices within CAT(0) distance
    R of a base apartment vertex) for R = 1..r_max, together with the
    least-squares exponent of log count against log R.  The apartment vertex
    set is the triangular lattice, so the exponent is 2 up to boundary terms.
    """
    if not is_opposite(c1, c2):
        raise NotOppositeError("strip is defined for opposite chambers")
    apartment_from_opposite(c1, c2)  # validates the span exists
    counts = []
    for r in range(1, r_max + 1):
        n = 0
        bound = r * r
        lim = int(math.isqrt(4 * bound // 3)) + 2
        for i in range(-lim, lim + 1):
            for j in range(-lim, lim + 1):
                if i * i - i * j + j * j <= bound:
                    n += 1
        counts.append((r, n))
    logs_r = np.log([r for r, _ in counts])
    logs_n = np.log([n for _, n in counts])
    exponent = float(np.polyfit(logs_r, logs_n, 1)[0]) if len(counts) > 1 \
        else float("nan")
    return counts, exponent
