"""Finite groupoids: cohomology, the convolution algebra and the trace.

For the pair groupoid on n points the convolution algebra is the n x n
matrix algebra (under F[s(g)][t(g)] = f(g)) and the canonical trace with
unit weights is the matrix trace.  Weights enter the trace as a transversal
density; the trace property holds exactly when they are constant on orbits.
"""

from fractions import Fraction

from algindex import (
    FiniteRep,
    convolve,
    cyclic_group_groupoid,
    groupoid_cohomology,
    pair_groupoid,
    trace,
)
from algindex.groupoid import (
    GroupoidError,
    arrow_matrix_bijection,
    invariance_counterexample,
    unit_function,
)
from algindex.linalg import matmul

pair3 = pair_groupoid(3)
print("pair groupoid on 3 points:", pair3)
print("Betti numbers:", groupoid_cohomology(pair3, FiniteRep.trivial(pair3), 3))

z2 = cyclic_group_groupoid(2)
print("Z/2 Betti numbers (rational coefficients):",
      groupoid_cohomology(z2, FiniteRep.trivial(z2), 3))

# convolution realizes matrix multiplication under f -> F[s][t] = f(g)
f1 = {g: Fraction(i) for i, g in enumerate(pair3.arrows)}
f2 = {g: Fraction((2 * i - 3) % 5) for i, g in enumerate(pair3.arrows)}
conv = convolve(f1, f2, pair3)
lhs = arrow_matrix_bijection(pair3, conv, 3)
rhs = matmul(
    arrow_matrix_bijection(pair3, f1, 3), arrow_matrix_bijection(pair3, f2, 3)
)
print("convolution == matrix multiplication:", lhs == rhs)
print("unit function is the convolution unit:",
      convolve(unit_function(pair3), f1, pair3) == f1)

# trace with unit weights is the matrix trace, and it is cyclic
weights = {x: Fraction(1) for x in pair3.objects}
print("tau(f1 * f2) =", trace(conv, weights, pair3))
print("tau(f2 * f1) =", trace(convolve(f2, f1, pair3), weights, pair3))

# a weight that varies inside an orbit destroys the trace property; the
# rejection carries an explicit counterexample pair
bad = {0: Fraction(1), 1: Fraction(2), 2: Fraction(1)}
g1, g2 = invariance_counterexample(pair3, bad)
try:
    trace(g1, bad, pair3)
except GroupoidError as exc:
    print("non-invariant weights rejected:", exc)
