"""
Lattice classes, canonical forms and exact distances
====================================================

Vertices of the affine building of SL3 over Q_p are homothety classes of
rank-3 lattices.  Everything below is exact rational arithmetic: equality is
decided by a canonical Hermite-style normal form over the local ring Z_(p),
and the CAT(0) metric is handled through exact squared values.
"""

from fractions import Fraction

from sl3building import (
    LatticeVertex,
    dist2,
    opposition_involution,
    standard_vertex,
    vector_distance,
)

p = 5
x = standard_vertex(p)
print("the standard vertex is the class of Z^3, canonical form:")
print("   ", x.matrix)

# two different generating matrices, one lattice class
y1 = LatticeVertex.from_matrix(p, ((5, 0, 0), (0, 1, 0), (0, 0, 1)))
y2 = LatticeVertex.from_matrix(p, ((5, 5, 0), (0, 1, 0), (0, 0, 1)))
print("\nsame lattice presented two ways, equal after canonicalization:",
      y1 == y2)

# the vector distance is the dominant triple of elementary-divisor exponents
print("\ntheta(x, y) for y = [5 e1, e2, e3]:", vector_distance(x, y1))

z = LatticeVertex.from_matrix(p, ((25, 3, 1), (0, 5, 2), (0, 0, 1)))
lam = vector_distance(x, z)
print("theta(x, z) for a deeper z:", lam)
print("theta(z, x) is its involution:", vector_distance(z, x),
      "=", opposition_involution(lam))

# squared distances are integers in the unit-edge normalization
print("\nsquared CAT(0) distances:")
print("    d^2(x, y) =", dist2(x, y1))
print("    d^2(x, z) =", dist2(x, z))

# scaling by any rational changes nothing: homothety classes
w = LatticeVertex.from_matrix(
    p, tuple(tuple(Fraction(e, 35) for e in row) for row in z.matrix))
print("\nscaling the basis by 1/35 keeps the class:", w == z)
