"""Finite groupoids: cochain complex, convolution algebra and the trace.

Conventions (fixed so that every displayed formula typechecks, and verified
by the exact d o d = 0 suite):

* an arrow g runs s(g) -> t(g); the product g1*g2 is defined exactly when
  t(g1) = s(g2) and runs s(g1) -> t(g2) ("do g1, then g2");
* composable k-tuples are chains x0 -> x1 -> ... -> xk, anchored at the end:
  a k-cochain assigns phi(g1..gk) in E_{t(gk)};
* a representation assigns lambda_g: E_{s(g)} -> E_{t(g)} with
  lambda_{g1*g2} = lambda_{g2} lambda_{g1} and lambda_{unit} = id.

The differential transports the last face:

    d phi(g1..g_{k+1}) = phi(g2..g_{k+1})
                       + sum_{i=1..k} (-1)^i phi(g1,..,g_i g_{i+1},..)
                       + (-1)^{k+1} lambda_{g_{k+1}} phi(g1..gk)

and in degree zero d phi(g) = lambda_g phi(s(g)) - phi(t(g)), so H^0 is the
space of invariant sections.  All scalars are exact rationals.
"""

from __future__ import annotations

from fractions import Fraction

from . import linalg


class GroupoidError(ValueError):
    pass


class FiniteGroupoid:
    """Finite arrows/objects with source, target, unit, inverse, composition."""

    def __init__(self, objects, arrows, source, target, unit, inverse, compose):
        self.objects = list(objects)
        self.arrows = list(arrows)
        self.source = dict(source)
        self.target = dict(target)
        self.unit = dict(unit)
        self.inverse = dict(inverse)
        self.compose_table = dict(compose)
        self._validate()

    def compose(self, g1, g2):
        """g1 * g2, defined when t(g1) = s(g2)."""
        key = (g1, g2)
        if key not in self.compose_table:
            raise GroupoidError(f"arrows {g1} and {g2} are not composable")
        return self.compose_table[key]

    def composable(self, g1, g2) -> bool:
        return self.target[g1] == self.source[g2]

    def _validate(self):
        for x in self.objects:
            u = self.unit[x]
            if self.source[u] != x or self.target[u] != x:
                raise GroupoidError(f"unit of {x} is not a loop at {x}")
        for g in self.arrows:
            if self.source[g] not in self.objects or self.target[g] not in self.objects:
                raise GroupoidError(f"arrow {g} has unknown endpoints")
            inv = self.inverse[g]
            if self.source[inv] != self.target[g] or self.target[inv] != self.source[g]:
                raise GroupoidError(f"inverse of {g} has wrong endpoints")
            if self.compose(g, inv) != self.unit[self.source[g]]:
                raise GroupoidError(f"g * g^-1 is not the unit at s({g})")
            if self.compose(inv, g) != self.unit[self.target[g]]:
                raise GroupoidError(f"g^-1 * g is not the unit at t({g})")
            if self.compose(self.unit[self.source[g]], g) != g:
                raise GroupoidError(f"unit does not act trivially on {g}")
            if self.compose(g, self.unit[self.target[g]]) != g:
                raise GroupoidError(f"unit does not act trivially on {g}")
        for g1 in self.arrows:
            for g2 in self.arrows:
                if self.composable(g1, g2) != ((g1, g2) in self.compose_table):
                    raise GroupoidError(
                        f"composition table disagrees with composability for {(g1, g2)}"
                    )
        for g1 in self.arrows:
            for g2 in self.arrows:
                if not self.composable(g1, g2):
                    continue
                for g3 in self.arrows:
                    if not self.composable(g2, g3):
                        continue
                    left = self.compose(self.compose(g1, g2), g3)
                    right = self.compose(g1, self.compose(g2, g3))
                    if left != right:
                        raise GroupoidError(
                            f"associativity fails on {(g1, g2, g3)}"
                        )

    def composable_tuples(self, k):
        """Chains (g1..gk) with t(g_i) = s(g_{i+1})."""
        if k == 0:
            return [()]
        by_source = {}
        for g in self.arrows:
            by_source.setdefault(self.source[g], []).append(g)
        tuples = [(g,) for g in self.arrows]
        for _ in range(k - 1):
            extended = []
            for chain in tuples:
                for g in by_source.get(self.target[chain[-1]], []):
                    extended.append(chain + (g,))
            tuples = extended
        return tuples

    def orbits(self):
        parent = {x: x for x in self.objects}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for g in self.arrows:
            a, b = find(self.source[g]), find(self.target[g])
            if a != b:
                parent[a] = b
        groups = {}
        for x in self.objects:
            groups.setdefault(find(x), []).append(x)
        return list(groups.values())

    def __repr__(self):
        return f"FiniteGroupoid({len(self.objects)} objects, {len(self.arrows)} arrows)"


def pair_groupoid(n) -> FiniteGroupoid:
    """The pair groupoid on n points: one arrow (x, y) from x to y."""
    objects = list(range(n))
    arrows = [(x, y) for x in objects for y in objects]
    source = {(x, y): x for (x, y) in arrows}
    target = {(x, y): y for (x, y) in arrows}
    unit = {x: (x, x) for x in objects}
    inverse = {(x, y): (y, x) for (x, y) in arrows}
    compose = {
        ((x, y), (y2, z)): (x, z)
        for (x, y) in arrows
        for (y2, z) in arrows
        if y == y2
    }
    return FiniteGroupoid(objects, arrows, source, target, unit, inverse, compose)


def cyclic_group_groupoid(n) -> FiniteGroupoid:
    """Z/n as a groupoid over a single object."""
    objects = ["*"]
    arrows = list(range(n))
    source = {g: "*" for g in arrows}
    target = {g: "*" for g in arrows}
    unit = {"*": 0}
    inverse = {g: (-g) % n for g in arrows}
    compose = {(g, h): (g + h) % n for g in arrows for h in arrows}
    return FiniteGroupoid(objects, arrows, source, target, unit, inverse, compose)


def disjoint_union(g1: FiniteGroupoid, g2: FiniteGroupoid) -> FiniteGroupoid:
    def tag(which, item):
        return (which, item)

    objects = [tag(0, x) for x in g1.objects] + [tag(1, x) for x in g2.objects]
    arrows = [tag(0, g) for g in g1.arrows] + [tag(1, g) for g in g2.arrows]
    source = {}
    target = {}
    inverse = {}
    for which, G in ((0, g1), (1, g2)):
        for g in G.arrows:
            source[tag(which, g)] = tag(which, G.source[g])
            target[tag(which, g)] = tag(which, G.target[g])
            inverse[tag(which, g)] = tag(which, G.inverse[g])
    unit = {tag(0, x): tag(0, g1.unit[x]) for x in g1.objects}
    unit.update({tag(1, x): tag(1, g2.unit[x]) for x in g2.objects})
    compose = {}
    for which, G in ((0, g1), (1, g2)):
        for (a, b), c in G.compose_table.items():
            compose[(tag(which, a), tag(which, b))] = tag(which, c)
    return FiniteGroupoid(objects, arrows, source, target, unit, inverse, compose)


class FiniteRep:
    """Per-object dimensions and per-arrow matrices over exact rationals.

    Matrices are stored in the "column vector" convention: lambda_g maps
    E_{s(g)} to E_{t(g)}, and lambda_{g1*g2} = lambda_{g2} @ lambda_{g1}.
    """

    def __init__(self, groupoid: FiniteGroupoid, dims, matrices):
        self.groupoid = groupoid
        self.dims = dict(dims)
        self.matrices = {g: linalg.mat(m) for g, m in matrices.items()}
        self._validate()

    @classmethod
    def trivial(cls, groupoid, dim=1):
        dims = {x: dim for x in groupoid.objects}
        matrices = {g: linalg.identity(dim) for g in groupoid.arrows}
        return cls(groupoid, dims, matrices)

    def _validate(self):
        G = self.groupoid
        for x in G.objects:
            if self.dims[x] < 0:
                raise GroupoidError("negative fiber dimension")
            if self.matrices[G.unit[x]] != linalg.identity(self.dims[x]):
                raise GroupoidError(f"unit matrix at {x} is not the identity")
        for g in G.arrows:
            m = self.matrices[g]
            if len(m) != self.dims[G.target[g]] or (
                m and len(m[0]) != self.dims[G.source[g]]
            ):
                raise GroupoidError(f"matrix shape of {g} mismatches fiber dims")
        for g1 in G.arrows:
            for g2 in G.arrows:
                if not G.composable(g1, g2):
                    continue
                composite = self.matrices[G.compose(g1, g2)]
                product = linalg.matmul(self.matrices[g2], self.matrices[g1])
                if composite != product:
                    raise GroupoidError(
                        f"representation is not functorial on {(g1, g2)}"
                    )

    def apply(self, g, vector):
        return [
            sum((row[j] * vector[j] for j in range(len(vector))), Fraction(0))
            for row in self.matrices[g]
        ]


# ---------------------------------------------------------------------------
# cohomology
# ---------------------------------------------------------------------------


def _cochain_basis(groupoid, rep, k):
    """Basis labels ((chain), component) of C^k; degree 0 uses objects."""
    if k == 0:
        return [((x,), j) for x in groupoid.objects for j in range(rep.dims[x])]
    out = []
    for chain in groupoid.composable_tuples(k):
        anchor = groupoid.target[chain[-1]]
        for j in range(rep.dims[anchor]):
            out.append((chain, j))
    return out


def differential_matrix(groupoid, rep, k):
    """Matrix of d: C^k -> C^{k+1} on the canonical bases, exact."""
    G = groupoid
    domain = _cochain_basis(G, rep, k)
    codomain = _cochain_basis(G, rep, k + 1)
    index = {label: i for i, label in enumerate(domain)}
    matrix = [[Fraction(0)] * len(domain) for _ in codomain]

    def add(row, chain, j, coeff):
        col = index.get((chain, j))
        if col is not None:
            matrix[row][col] += coeff

    for row, (chain, comp) in enumerate(codomain):
        if k == 0:
            (g,) = chain
            # d phi(g) = lambda_g phi(s(g)) - phi(t(g))
            mat = rep.matrices[g]
            for j in range(rep.dims[G.source[g]]):
                add(row, (G.source[g],), j, mat[comp][j])
            add(row, (G.target[g],), comp, Fraction(-1))
            continue
        # front face: drop g1
        add(row, chain[1:], comp, Fraction(1))
        # middle faces: compose g_i g_{i+1}
        for i in range(1, k + 1):
            merged = (
                chain[: i - 1]
                + (G.compose(chain[i - 1], chain[i]),)
                + chain[i + 1 :]
            )
            add(row, merged, comp, Fraction((-1) ** i))
        # back face: drop g_{k+1}, transported by lambda
        g_last = chain[-1]
        mat = rep.matrices[g_last]
        sign = Fraction((-1) ** (k + 1))
        for j in range(rep.dims[G.source[g_last]]):
            add(row, chain[:-1], j, sign * mat[comp][j])
    return matrix


def groupoid_cohomology(groupoid, rep=None, max_degree=2):
    """Betti numbers of the finite cochain complex by exact ranks."""
    rep = rep or FiniteRep.trivial(groupoid)
    dims = [len(_cochain_basis(groupoid, rep, k)) for k in range(max_degree + 1)]
    ranks = [
        linalg.rank(differential_matrix(groupoid, rep, k))
        for k in range(max_degree + 1)
    ]
    betti = []
    for k in range(max_degree + 1):
        kernel = dims[k] - ranks[k]
        image_prev = ranks[k - 1] if k > 0 else 0
        betti.append(kernel - image_prev)
    return betti


# ---------------------------------------------------------------------------
# convolution algebra and trace
# ---------------------------------------------------------------------------


def convolve(f1, f2, groupoid: FiniteGroupoid):
    """(f1 * f2)(g) = sum over t(h) = t(g) of f1(g h^-1) f2(h).

    Equivalently the sum of f1(g1) f2(g2) over factorizations g = g1 * g2;
    for the pair groupoid this is matrix multiplication.
    """
    G = groupoid
    out = {g: Fraction(0) for g in G.arrows}
    by_target = {}
    for h in G.arrows:
        by_target.setdefault(G.target[h], []).append(h)
    for g in G.arrows:
        acc = Fraction(0)
        for h in by_target.get(G.target[g], []):
            gh_inv = G.compose(g, G.inverse[h])
            acc += f1.get(gh_inv, Fraction(0)) * f2.get(h, Fraction(0))
        out[g] = acc
    return out


def unit_function(groupoid):
    out = {g: Fraction(0) for g in groupoid.arrows}
    for x in groupoid.objects:
        out[groupoid.unit[x]] = Fraction(1)
    return out


def delta(groupoid, arrow):
    out = {g: Fraction(0) for g in groupoid.arrows}
    out[arrow] = Fraction(1)
    return out


def is_invariant_weight(groupoid, weights) -> bool:
    return all(
        weights[groupoid.source[g]] == weights[groupoid.target[g]]
        for g in groupoid.arrows
    )


def invariance_counterexample(groupoid, weights):
    """A pair (f1, f2) witnessing failure of the trace property, or None."""
    for g in groupoid.arrows:
        if weights[groupoid.source[g]] != weights[groupoid.target[g]]:
            return delta(groupoid, g), delta(groupoid, groupoid.inverse[g])
    return None


def trace(f, weights, groupoid: FiniteGroupoid) -> Fraction:
    """tau(f) = sum_x f(unit_x) * weight(x); weights must be orbit-constant.

    A non-invariant weight is rejected, and the exception carries an explicit
    function pair with tau(f1*f2) != tau(f2*f1).
    """
    for x in groupoid.objects:
        if weights[x] <= 0:
            raise GroupoidError("weights must be positive")
    if not is_invariant_weight(groupoid, weights):
        f1, f2 = invariance_counterexample(groupoid, weights)
        lhs = sum(
            (convolve(f1, f2, groupoid)[groupoid.unit[x]] * weights[x]
             for x in groupoid.objects),
            Fraction(0),
        )
        rhs = sum(
            (convolve(f2, f1, groupoid)[groupoid.unit[x]] * weights[x]
             for x in groupoid.objects),
            Fraction(0),
        )
        raise GroupoidError(
            "weights are not constant on orbits; trace property fails on a "
            f"delta pair ({lhs} != {rhs})"
        )
    return sum(
        (Fraction(f.get(groupoid.unit[x], 0)) * Fraction(weights[x])
         for x in groupoid.objects),
        Fraction(0),
    )


def arrow_matrix_bijection(groupoid, f, n):
    """Pair-groupoid functions as matrices: F[s(g)][t(g)] = f(g)."""
    out = [[Fraction(0)] * n for _ in range(n)]
    for (x, y), value in f.items():
        out[x][y] = Fraction(value)
    return out
