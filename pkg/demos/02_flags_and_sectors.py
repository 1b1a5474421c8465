"""
Chambers at infinity: flags, Schubert cells, sectors and retractions
====================================================================

A chamber of the spherical building at infinity is a complete flag in Q^3.
Relative position of two flags is a permutation in S3; opposite flags span a
unique apartment.  Sectors based at a vertex realize the cone topology, and
the retraction onto an apartment is computed from an exact Iwasawa-type
normal form.
"""

from sl3building import (
    Flag,
    apartment_chambers,
    apartment_from_opposite,
    boundary_retraction,
    common_depth,
    is_opposite,
    retraction,
    sector_membership,
    standard_vertex,
    weyl_distance,
)
from sl3building.building import LatticeVertex, frame_vertex

p = 5
C = Flag.standard()            # <e1> < <e1, e2>
D = Flag.reversed_standard()   # <e3> < <e2, e3>

print("relative position of a flag with itself:", weyl_distance(C, C))
print("relative position of the standard and reversed flags:",
      weyl_distance(C, D), " (the order-reversing permutation)")
print("opposite?", is_opposite(C, D))

frame = apartment_from_opposite(C, D)
print("\nthe apartment they span has frame lines:", frame.lines)
print("its six ideal chambers include both:",
      C in apartment_chambers(frame), D in apartment_chambers(frame))

# sectors: the diagonal lattice with ascending exponents sits in the sector
# from the standard vertex toward the standard flag
x = standard_vertex(p)
y = LatticeVertex.from_matrix(p, ((1, 0, 0), (0, 5, 0), (0, 0, 25)))
print("\ny in Q(x, C):", sector_membership(x, C, y))
print("y in Q(x, D):", sector_membership(x, D, y))

# the agreement depth of two chambers along the equal-growth ray measures
# how close they are in the cone topology
near = Flag.from_matrix(((1, 0, 0), (25, 1, 0), (25, 25, 1)))
print("\ncommon depth of C with a mod-25 perturbation:",
      common_depth(C, near, x, 6))
print("common depth of C with its opposite:", common_depth(C, D, x, 6))

# retraction onto the apartment centered at C: fixes the apartment,
# never increases distances
v = frame_vertex(frame, p, (0, 1, 2))
u = ((1, 2, 3), (0, 1, 4), (0, 0, 1))  # unipotent fixing C
moved = v.apply(u)
print("\nretraction undoes a C-unipotent move:", retraction(frame, C, moved) == v)

# the boundary extension sends a generic flag to the chamber opposite the center
generic = Flag.from_matrix(((1, 1, 2), (1, 2, 1), (3, 1, 1)))
print("boundary retraction centered at D of a generic flag:",
      boundary_retraction(frame, D, generic, p) == C)
