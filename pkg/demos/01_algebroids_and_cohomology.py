"""Presentations, validation and Chevalley-Eilenberg cohomology.

A Lie algebroid presentation is a frame e_1..e_r over a chart together with
an anchor matrix and structure functions.  Validation expands the anchor
bracket-morphism identity and the Jacobi identity symbolically and reports
every nonzero residual; exact rank computation then gives the cohomology of
constant-coefficient presentations.
"""

from algindex import (
    AlgForm,
    Chart,
    abelian_bundle,
    action_algebroid,
    aff1,
    cohomology_const,
    d_g,
    su2,
    tangent,
)
from algindex.algebroid import AlgebroidPresentation

# A tangent algebroid is always valid: the anchor is the identity.
t2 = tangent(2)
print("tangent(2):", t2.validate())

# su(2) over a point, with its epsilon-tensor structure constants.
A = su2()
print("su2:", A.validate())
print("su2 Betti numbers:", cohomology_const(A))

# The nonabelian 2-dimensional algebra [e1, e2] = e2 has b_1 = 1:
# e^1 is closed but not exact, while d e^2 = -e^1 ^ e^2.
B = aff1()
print("aff(1) Betti numbers:", cohomology_const(B))
e2 = AlgForm.dual_basis(B, (1,))
print("d e^2 =", d_g(e2))

# Abelian R^3 gives the exterior algebra: binomial Betti numbers.
print("abelian R^3:", cohomology_const(abelian_bundle(0, 3)))

# An action algebroid: so(3) acting on R^3 through rotation fields.
chart = Chart(("x", "y", "z"))
x, y, z = (chart.coord(i) for i in range(3))
zero = chart.zero()
fields = [[zero, z, -y], [-z, zero, x], [y, -x, zero]]
structure = {(0, 1): [0, 0, 1], (1, 2): [1, 0, 0], (0, 2): [0, -1, 0]}
action = action_algebroid(structure, fields, chart, "so3-on-R3")
print("so(3) action algebroid:", action.validate())

# Validation is diagnostic, not boolean: a genuinely broken bracket reports
# the offending triple and the symbolic residual.
broken = AlgebroidPresentation(
    Chart((), "poly"),
    3,
    [[], [], []],
    {(0, 1): [0, 0, 1], (1, 2): [1, 0, 1], (0, 2): [0, -1, 0]},
    "broken",
)
print(broken.validate())
