"""
Strongly regular hyperbolic elements and their boundary dynamics
================================================================

An element of SL3(Q) with three rational eigenvalues of pairwise distinct
p-adic valuations translates a unique apartment; its powers contract the big
cell toward an attracting chamber.  Certification is exact (Newton polygon
plus Hensel lifting), and the power-iteration limit is cross-checked against
the independent retraction route.
"""

from fractions import Fraction

from sl3building import (
    Flag,
    GroupElement,
    boundary_retraction,
    certify_srh,
    harmonic_sample,
    limit_set_sample,
    make_srh,
    north_south_limit,
    proximal_pair_check,
    universal_contraction,
)
from sl3building.building import standard_vertex
from sl3building.rng import make_rng

p = 5

# build the diagonal translation with vector (2, 1, 0) on the standard frame
cert = make_srh(((1, 0, 0), (0, 1, 0), (0, 0, 1)), (2, 1, 0), p)
print("element:", [[str(e) for e in row] for row in cert.element.matrix])
print("translation vector:", cert.lam)
print("attracting chamber = standard flag:", cert.attracting == Flag.standard())

# certification recovers everything from the matrix alone
recovered = certify_srh(cert.element, p)
print("re-certified:", bool(recovered), recovered.lam)

# rejections are typed, never guessed
print("\nidentity:", certify_srh(GroupElement.from_matrix(
    ((1, 0, 0), (0, 1, 0), (0, 0, 1))), p).reason)
print("repeated valuation:", certify_srh(GroupElement.from_matrix(
    ((5, 0, 0), (0, 5, 0), (0, 0, Fraction(1, 25)))), p).reason)

# north-south dynamics: the power iteration limit equals the boundary
# retraction centered at the repelling chamber, for every chamber
rng = make_rng(1)
x = standard_vertex(p)
agree = 0
for _ in range(20):
    c = harmonic_sample(x, 4, rng)
    limit = north_south_limit(cert, c)
    agree += limit == boundary_retraction(cert.frame, cert.repelling, c, p)
print("\npower iteration vs retraction, 20 random chambers:", agree, "/ 20")

# a pair in generic position contracts everything to one chamber
from sl3building import construct_generic, apartment_from_opposite
from sl3building.boundary import chamber_order_in_frame, is_opposite

c3 = construct_generic(cert.attracting, cert.repelling, p, rng=rng, depth=4)
while True:
    cand = harmonic_sample(x, 4, rng)
    if is_opposite(cand, c3):
        break
frame2 = apartment_from_opposite(cand, c3)
order = chamber_order_in_frame(frame2, cand)
cert2 = make_srh(tuple(frame2.lines[i] for i in order), (2, 1, 0), p)
print("\ncontraction hypothesis holds:", proximal_pair_check(cert, cert2))
hard = cert.repelling  # the worst input for the first element alone
print("g2^n g1^n pushes even it to C2+:",
      universal_contraction(cert, cert2, hard) == cert2.attracting)

# word enumeration approximates the flag limit set
sample = limit_set_sample([cert.element, cert2.element], 3, p)
print("\ndistinct attracting chambers among words of length <= 3:",
      len(sample.flags))
