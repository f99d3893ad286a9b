"""Lie algebroid presentations in a finite frame over a single chart.

A presentation stores the anchor matrix and the structure functions of a
frame e_1..e_r over chart coordinates x_1..x_n:

    rho(e_a) = sum_i anchor[a][i] d/dx_i
    [e_a, e_b] = sum_c C^c_ab e_c        (C stored for a < b only)

``validate`` checks antisymmetry (structural), the anchor bracket-morphism
identity and the Jacobi identity by exact symbolic expansion and reports
every nonzero residual.  Direct products, trivial-fibration pull-backs and
morphisms (with their two compatibility conditions) live here as well.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .scalars import Chart


class PresentationError(ValueError):
    """Malformed arrays or dimension mismatches."""


@dataclass
class Violation:
    kind: str
    indices: tuple
    residual: object

    def __str__(self):
        return f"{self.kind} at {self.indices}: residual {self.residual}"


@dataclass
class ValidationReport:
    subject: str
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind, indices, residual):
        self.violations.append(Violation(kind, tuple(indices), residual))

    def __str__(self):
        if self.ok:
            return f"{self.subject}: valid"
        lines = [f"{self.subject}: {len(self.violations)} violation(s)"]
        lines += [f"  {v}" for v in self.violations]
        return "\n".join(lines)


@dataclass
class PullbackData:
    """Bookkeeping for presentations built by :func:`pullback`."""

    parent: "AlgebroidPresentation"
    fiber_dim: int
    # frame indices of the horizontal lifts and of the vertical fields
    horizontal: tuple
    vertical: tuple
    # chart indices of the fiber coordinates
    fiber_coords: tuple


class AlgebroidPresentation:
    """A Lie algebroid in a finite frame over one chart."""

    def __init__(self, chart: Chart, rank: int, anchor, structure, name="algebroid"):
        self.chart = chart
        self.rank = int(rank)
        self.name = name
        self.pullback_data = None
        if len(anchor) != self.rank:
            raise PresentationError("anchor needs one row per frame element")
        self.anchor = [
            [chart.coerce(entry) for entry in row] for row in anchor
        ]
        for row in self.anchor:
            if len(row) != chart.dim:
                raise PresentationError("anchor rows must match the chart dimension")
        self.structure = {}
        for key, coeffs in structure.items():
            a, b = key
            if not (0 <= a < self.rank and 0 <= b < self.rank):
                raise PresentationError(f"structure index {key} out of range")
            if a == b:
                raise PresentationError("diagonal structure entries must be absent")
            coeffs = [chart.coerce(c) for c in coeffs]
            if len(coeffs) != self.rank:
                raise PresentationError("structure coefficient vector has wrong length")
            if a > b:
                a, b, coeffs = b, a, [-c for c in coeffs]
            if (a, b) in self.structure:
                raise PresentationError(f"duplicate structure entry for {(a, b)}")
            if any(not c.is_zero() for c in coeffs):
                self.structure[(a, b)] = coeffs

    @property
    def base_dim(self):
        return self.chart.dim

    def scalar(self, value):
        return self.chart.coerce(value)

    def bracket(self, a, b):
        """Coefficients of [e_a, e_b] in the frame (antisymmetry applied)."""
        if a == b:
            return [self.chart.zero()] * self.rank
        if a < b:
            coeffs = self.structure.get((a, b))
            return list(coeffs) if coeffs else [self.chart.zero()] * self.rank
        coeffs = self.structure.get((b, a))
        return [-c for c in coeffs] if coeffs else [self.chart.zero()] * self.rank

    def anchor_apply(self, a, scalar):
        """Derivation rho(e_a) acting on a chart scalar."""
        out = self.chart.zero()
        for i in range(self.base_dim):
            coeff = self.anchor[a][i]
            if not coeff.is_zero():
                out = out + coeff * scalar.derive(i)
        return out

    # -- validation ----------------------------------------------------------

    def validate(self) -> ValidationReport:
        report = ValidationReport(self.name)
        self._check_anchor_morphism(report)
        self._check_jacobi(report)
        return report

    def _check_anchor_morphism(self, report):
        # rho([e_a,e_b])^i = rho(e_a)(rho^i_b) - rho(e_b)(rho^i_a)
        for a in range(self.rank):
            for b in range(a + 1, self.rank):
                coeffs = self.bracket(a, b)
                for i in range(self.base_dim):
                    lhs = self.chart.zero()
                    for c in range(self.rank):
                        if not coeffs[c].is_zero():
                            lhs = lhs + coeffs[c] * self.anchor[c][i]
                    rhs = self.anchor_apply(a, self.anchor[b][i]) - self.anchor_apply(
                        b, self.anchor[a][i]
                    )
                    residual = lhs - rhs
                    if not residual.is_zero():
                        report.add("anchor-morphism", (a + 1, b + 1, i + 1), residual)

    def _jacobiator(self, a, b, c):
        """Coefficients of [[e_a,e_b],e_c] + cyclic, via the Leibniz rule."""
        total = [self.chart.zero()] * self.rank
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            inner = self.bracket(x, y)
            for d in range(self.rank):
                coeff = inner[d]
                if coeff.is_zero():
                    continue
                outer = self.bracket(d, z)
                for e in range(self.rank):
                    if not outer[e].is_zero():
                        total[e] = total[e] + coeff * outer[e]
                # [f e_d, e_z] = f [e_d,e_z] - rho(e_z)(f) e_d
                total[d] = total[d] - self.anchor_apply(z, coeff)
        return total

    def _check_jacobi(self, report):
        for a in range(self.rank):
            for b in range(a + 1, self.rank):
                for c in range(b + 1, self.rank):
                    residual = self._jacobiator(a, b, c)
                    for e, value in enumerate(residual):
                        if not value.is_zero():
                            report.add("jacobi", (a + 1, b + 1, c + 1), value)
                            break

    def __repr__(self):
        return (
            f"AlgebroidPresentation({self.name!r}, rank={self.rank}, "
            f"base_dim={self.base_dim})"
        )


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------


def _default_chart(n, backend="poly", stem="x"):
    return Chart(tuple(f"{stem}{i + 1}" for i in range(n)), backend)


def tangent(n, chart=None, name=None):
    """The tangent algebroid of an n-dimensional chart (identity anchor)."""
    chart = chart or _default_chart(n)
    if chart.dim != n:
        raise PresentationError("chart dimension must equal n")
    anchor = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    return AlgebroidPresentation(chart, n, anchor, {}, name or f"tangent({n})")


def lie_algebra(structure, rank, name="lie_algebra"):
    """A Lie algebra presented over a point (base_dim 0, zero anchor)."""
    chart = Chart((), "poly")
    anchor = [[] for _ in range(rank)]
    A = AlgebroidPresentation(chart, rank, anchor, structure, name)
    report = A.validate()
    if not report.ok:
        raise PresentationError(f"structure constants are not a Lie algebra:\n{report}")
    return A


def action_algebroid(structure, vector_fields, chart, name="action"):
    """Action algebroid: Lie algebra structure plus vector-field images.

    ``vector_fields[a]`` is the coefficient list of the image of the a-th
    generator.  Validity (that the images realize the bracket relations) is
    checked by ``validate``.
    """
    rank = len(vector_fields)
    A = AlgebroidPresentation(chart, rank, vector_fields, structure, name)
    report = A.validate()
    if not report.ok:
        raise PresentationError(f"not a Lie algebra action:\n{report}")
    return A


def abelian_bundle(n, rank, chart=None, name=None):
    """Trivial bundle with zero anchor and zero bracket."""
    chart = chart or _default_chart(n)
    anchor = [[0] * n for _ in range(rank)]
    return AlgebroidPresentation(
        chart, rank, anchor, {}, name or f"abelian({n},{rank})"
    )


def su2(name="su2"):
    """Structure constants C^3_12 = C^1_23 = C^2_31 = 1 over a point."""
    structure = {
        (0, 1): [0, 0, 1],
        (1, 2): [1, 0, 0],
        (0, 2): [0, -1, 0],
    }
    return lie_algebra(structure, 3, name)


def aff1(name="aff1"):
    """The nonabelian 2-dimensional Lie algebra, [e1, e2] = e2."""
    return lie_algebra({(0, 1): [0, 1]}, 2, name)


def _transport(scalar, chart, offset, count):
    """Re-express a scalar on ``chart`` with its coordinates at offset.."""
    if count == 0:
        return chart.const(scalar.constant_value())
    return scalar.substitute([chart.coord(offset + i) for i in range(count)])


def product(a1: AlgebroidPresentation, a2: AlgebroidPresentation, name=None):
    """Direct product; mixed brackets vanish, anchors act blockwise."""
    if a1.chart.backend != a2.chart.backend:
        raise PresentationError("product factors must share a scalar backend")
    names1, names2 = a1.chart.names, a2.chart.names
    if set(names1) & set(names2):
        names1 = tuple(f"{n}_1" for n in names1)
        names2 = tuple(f"{n}_2" for n in names2)
    chart = Chart(names1 + names2, a1.chart.backend)
    n1, n2 = a1.base_dim, a2.base_dim
    r1 = a1.rank

    def lift1(s):
        return _transport(s, chart, 0, n1)

    def lift2(s):
        return _transport(s, chart, n1, n2)

    anchor = []
    for a in range(r1):
        anchor.append([lift1(v) for v in a1.anchor[a]] + [chart.zero()] * n2)
    for a in range(a2.rank):
        anchor.append([chart.zero()] * n1 + [lift2(v) for v in a2.anchor[a]])
    structure = {}
    for (x, y), coeffs in a1.structure.items():
        structure[(x, y)] = [lift1(c) for c in coeffs] + [chart.zero()] * a2.rank
    for (x, y), coeffs in a2.structure.items():
        structure[(x + r1, y + r1)] = [chart.zero()] * r1 + [lift2(c) for c in coeffs]
    return AlgebroidPresentation(
        chart,
        r1 + a2.rank,
        anchor,
        structure,
        name or f"{a1.name}*{a2.name}",
    )


def pullback(A: AlgebroidPresentation, fiber_dim, fiber_names=None, name=None):
    """Pull-back along the projection of the trivial fibration M x R^m -> M.

    The frame consists of horizontal lifts h_a = (e_a, rho(e_a)) followed by
    the vertical fields v_j = (0, d/du_j); brackets of horizontals reproduce
    the structure functions of A, all brackets involving verticals vanish.
    With ``fiber_dim == A.rank`` this is the pull-back over the dual bundle
    in a trivialization, base for the symplectic/Thom machinery.
    """
    m = int(fiber_dim)
    fiber_names = tuple(fiber_names or (f"u{j + 1}" for j in range(m)))
    if len(fiber_names) != m:
        raise PresentationError("need one name per fiber coordinate")
    chart = A.chart.extended(fiber_names)
    r = A.rank

    def lift(s):
        return s.extend_vars(chart.names)

    anchor = []
    for a in range(r):
        anchor.append([lift(v) for v in A.anchor[a]] + [chart.zero()] * m)
    for j in range(m):
        anchor.append(
            [chart.zero()] * A.base_dim
            + [chart.one() if i == j else chart.zero() for i in range(m)]
        )
    structure = {}
    for (a, b), coeffs in A.structure.items():
        structure[(a, b)] = [lift(c) for c in coeffs] + [chart.zero()] * m
    out = AlgebroidPresentation(
        chart, r + m, anchor, structure, name or f"pullback({A.name},{m})"
    )
    out.pullback_data = PullbackData(
        parent=A,
        fiber_dim=m,
        horizontal=tuple(range(r)),
        vertical=tuple(range(r, r + m)),
        fiber_coords=tuple(range(A.base_dim, A.base_dim + m)),
    )
    return out


# ---------------------------------------------------------------------------
# morphisms
# ---------------------------------------------------------------------------


class AlgebroidMorphism:
    """A base map plus a bundle map expressing phi(e_a) in the target frame.

    ``base_map[i]`` gives the i-th target coordinate as a scalar on the
    source chart; ``bundle_map[a][b]`` is the coefficient of the target frame
    element e_b in phi(e_a), again a scalar on the source chart.
    """

    def __init__(self, source, target, base_map, bundle_map, name="morphism"):
        self.source = source
        self.target = target
        self.name = name
        self.base_map = [source.chart.coerce(c) for c in base_map]
        if len(self.base_map) != target.base_dim:
            raise PresentationError("base map needs one component per target coordinate")
        self.bundle_map = [
            [source.chart.coerce(c) for c in row] for row in bundle_map
        ]
        if len(self.bundle_map) != source.rank or any(
            len(row) != target.rank for row in self.bundle_map
        ):
            raise PresentationError("bundle map must be source_rank x target_rank")

    def compose_scalar(self, scalar):
        """Pull a target-chart scalar back along the base map."""
        return scalar.substitute(self.base_map)

    def validate(self) -> ValidationReport:
        report = ValidationReport(self.name)
        src, tgt = self.source, self.target
        phi = self.bundle_map
        # anchors: rho_2(phi(e_a))^i = sum_j rho_1(e_a)^j d f^i/dx_j
        for a in range(src.rank):
            for i in range(tgt.base_dim):
                lhs = src.chart.zero()
                for b in range(tgt.rank):
                    if not phi[a][b].is_zero():
                        lhs = lhs + phi[a][b] * self.compose_scalar(tgt.anchor[b][i])
                rhs = src.anchor_apply(a, self.base_map[i])
                residual = lhs - rhs
                if not residual.is_zero():
                    report.add("anchor-compatibility", (a + 1, i + 1), residual)
        # brackets: phi([e_a,e_b]) = sum phi^c_a phi^d_b [e_c,e_d] o f
        #           + rho_1(e_a)(phi^d_b) e_d - rho_1(e_b)(phi^c_a) e_c
        for a in range(src.rank):
            for b in range(a + 1, src.rank):
                lhs = [src.chart.zero()] * tgt.rank
                for c, coeff in enumerate(src.bracket(a, b)):
                    if coeff.is_zero():
                        continue
                    for d in range(tgt.rank):
                        if not phi[c][d].is_zero():
                            lhs[d] = lhs[d] + coeff * phi[c][d]
                rhs = [src.chart.zero()] * tgt.rank
                for c in range(tgt.rank):
                    if phi[a][c].is_zero():
                        continue
                    for d in range(tgt.rank):
                        if phi[b][d].is_zero():
                            continue
                        target_bracket = tgt.bracket(c, d)
                        for e in range(tgt.rank):
                            if not target_bracket[e].is_zero():
                                rhs[e] = rhs[e] + phi[a][c] * phi[b][d] * (
                                    self.compose_scalar(target_bracket[e])
                                )
                for d in range(tgt.rank):
                    rhs[d] = rhs[d] + src.anchor_apply(a, phi[b][d])
                    rhs[d] = rhs[d] - src.anchor_apply(b, phi[a][d])
                for d in range(tgt.rank):
                    residual = lhs[d] - rhs[d]
                    if not residual.is_zero():
                        report.add("bracket-compatibility", (a + 1, b + 1, d + 1), residual)
        return report

    def __repr__(self):
        return f"AlgebroidMorphism({self.name!r}: {self.source.name} -> {self.target.name})"


def validate_morphism(morphism: AlgebroidMorphism) -> ValidationReport:
    return morphism.validate()


def identity_morphism(A: AlgebroidPresentation):
    base = [A.chart.coord(i) for i in range(A.base_dim)]
    bundle = [
        [A.chart.one() if i == j else A.chart.zero() for j in range(A.rank)]
        for i in range(A.rank)
    ]
    return AlgebroidMorphism(A, A, base, bundle, name=f"id_{A.name}")


def anchor_morphism(A: AlgebroidPresentation, target=None):
    """The anchor as a morphism A -> tangent(base) over the identity."""
    target = target or tangent(A.base_dim, A.chart, name=f"T({A.name})")
    if target.chart != A.chart:
        raise PresentationError("anchor morphism requires a shared chart")
    base = [A.chart.coord(i) for i in range(A.base_dim)]
    bundle = [list(row) for row in A.anchor]
    return AlgebroidMorphism(A, target, base, bundle, name=f"anchor_{A.name}")


def zero_section_morphism(pb: AlgebroidPresentation):
    """The inclusion X -> (X, rho(X)) of A into its trivial-fibration pull-back."""
    data = pb.pullback_data
    if data is None:
        raise PresentationError("target is not a pull-back presentation")
    A = data.parent
    base = [A.chart.coord(i) for i in range(A.base_dim)] + [
        A.chart.zero() for _ in range(data.fiber_dim)
    ]
    bundle = []
    for a in range(A.rank):
        bundle.append(
            [A.chart.one() if h == a else A.chart.zero() for h in range(pb.rank)]
        )
    return AlgebroidMorphism(A, pb, base, bundle, name=f"zero_section_{A.name}")


def fiber_inclusion_morphism(pb: AlgebroidPresentation, base_point):
    """Tangent algebroid of one fiber, included at a fixed base point."""
    data = pb.pullback_data
    if data is None:
        raise PresentationError("target is not a pull-back presentation")
    A = data.parent
    m = data.fiber_dim
    fiber_chart = Chart(
        tuple(pb.chart.names[i] for i in data.fiber_coords), pb.chart.backend
    )
    fiber = tangent(m, fiber_chart, name=f"fiber_of_{pb.name}")
    base_point = [fiber_chart.coerce(p) for p in base_point]
    if len(base_point) != A.base_dim:
        raise PresentationError("base point must match the parent base dimension")
    base = list(base_point) + [fiber_chart.coord(j) for j in range(m)]
    bundle = []
    for j in range(m):
        bundle.append(
            [
                fiber_chart.one() if k == data.vertical[j] else fiber_chart.zero()
                for k in range(pb.rank)
            ]
        )
    return AlgebroidMorphism(fiber, pb, base, bundle, name=f"fiber_inclusion_{pb.name}")
