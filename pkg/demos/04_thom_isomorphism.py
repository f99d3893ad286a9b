"""The formal Thom calculus and its compatibility with integration.

Pulling an algebroid back over its own dual gives a presentation carrying a
canonical symplectic form (with Lie-Poisson corrections solved for exactly
when the structure functions are nonzero).  The Thom map alpha -> pi*alpha
^ Th composed with fiber integration is the identity, and the twisted
integral over the dual agrees with the base integral.
"""

from algindex import (
    AlgForm,
    Density,
    d_g,
    fiber_integrate,
    pullback,
    su2,
    symplectic_form,
    thom_class,
    thom_compatibility,
    thom_map,
)
from algindex.thom_index import symplectic_top_power

A = su2()
pb = pullback(A, A.rank)
print("dual pull-back:", pb.name, "rank", pb.rank, "over", pb.base_dim, "coordinates")

theta = symplectic_form(pb)
print("Theta =", theta)
print("d Theta = 0:", d_g(theta).is_zero())
print("Theta^3 nondegenerate:", not symplectic_top_power(pb, theta).is_zero())

# Thom map and fiber integration are mutually inverse on representatives.
alpha = AlgForm.dual_basis(A, (0, 1))
extended = thom_map(alpha, pb)
print("thom_map(e^1^e^2) =", extended)
print("fiber_integrate o thom_map == id:",
      fiber_integrate(extended).degree_part(2) == alpha)

# Th is nilpotent and vertical directions die against it.
th = thom_class(pb)
print("Th ^ Th = 0:", th.wedge(th).is_zero())

# Both integration paths: direct pairing on the base against the density,
# versus pull-back, Thom map and fiber integration against Theta^r (x) the
# pulled-back density.
top = AlgForm.dual_basis(A, (0, 1, 2))
check = thom_compatibility(A, top, Density(A, 1))
print(check)
