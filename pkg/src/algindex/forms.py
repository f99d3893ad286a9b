"""E-valued algebroid forms, the Koszul differential and wedge algebra.

Coefficients are stored on strictly increasing frame-index tuples; the value
on an arbitrary tuple is recovered with the sorting sign.  The differential

    d w(X_0..X_k) = sum_i (-1)^i  nabla_{X_i} w(.. X_i omitted ..)
                  + sum_{i<j} (-1)^{i+j} w([X_i,X_j], .. X_i, X_j omitted ..)

is the unique sign arrangement with d o d = 0 (enforced by the test suite);
on the tangent algebroid with the trivial connection it is the de Rham
differential, over a point it is the Chevalley-Eilenberg differential.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from . import linalg
from .algebroid import AlgebroidPresentation, AlgebroidMorphism


def _sort_sign(indices):
    """(sign, sorted tuple) of an index tuple, or (0, None) on repeats."""
    indices = list(indices)
    if len(set(indices)) != len(indices):
        return 0, None
    sign = 1
    for i in range(len(indices)):
        for j in range(i + 1, len(indices)):
            if indices[i] > indices[j]:
                sign = -sign
    return sign, tuple(sorted(indices))


class AlgForm:
    """A bundle-valued algebroid form of one degree."""

    def __init__(self, algebroid: AlgebroidPresentation, degree, coeffs=None, bundle_rank=1):
        self.algebroid = algebroid
        self.degree = int(degree)
        self.bundle_rank = int(bundle_rank)
        if not 0 <= self.degree <= algebroid.rank:
            raise ValueError(f"degree {degree} out of range for rank {algebroid.rank}")
        self.coeffs = {}
        for indices, values in (coeffs or {}).items():
            indices = tuple(int(i) for i in indices)
            if len(indices) != self.degree:
                raise ValueError(f"index tuple {indices} has wrong length")
            if list(indices) != sorted(set(indices)):
                raise ValueError(f"index tuple {indices} must be strictly increasing")
            if any(not 0 <= i < algebroid.rank for i in indices):
                raise ValueError(f"index tuple {indices} out of range")
            if not isinstance(values, (tuple, list)):
                values = (values,)
            if len(values) != self.bundle_rank:
                raise ValueError("coefficient vector has wrong bundle rank")
            values = tuple(algebroid.scalar(v) for v in values)
            if any(not v.is_zero() for v in values):
                self.coeffs[indices] = values

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, algebroid, degree=0, bundle_rank=1):
        return cls(algebroid, min(degree, algebroid.rank), {}, bundle_rank)

    @classmethod
    def constant(cls, algebroid, value, bundle_rank=1):
        if bundle_rank == 1 and not isinstance(value, (tuple, list)):
            value = (value,)
        return cls(algebroid, 0, {(): tuple(value)}, bundle_rank)

    @classmethod
    def dual_basis(cls, algebroid, indices):
        """The basis form e^{i1} ^ ... ^ e^{ik} (0-based increasing indices)."""
        return cls(algebroid, len(indices), {tuple(indices): (1,)})

    # -- algebra -------------------------------------------------------------

    def _compatible(self, other):
        if self.algebroid is not other.algebroid:
            raise ValueError("forms live on different algebroids")
        if self.bundle_rank != other.bundle_rank:
            raise ValueError("forms have different bundle ranks")

    def __add__(self, other):
        if not isinstance(other, AlgForm):
            return NotImplemented
        self._compatible(other)
        if self.degree != other.degree:
            if self.is_zero():
                return other
            if other.is_zero():
                return self
            raise ValueError("cannot add forms of different degrees")
        out = {k: list(v) for k, v in self.coeffs.items()}
        for k, values in other.coeffs.items():
            if k in out:
                out[k] = [a + b for a, b in zip(out[k], values)]
            else:
                out[k] = list(values)
        return AlgForm(self.algebroid, self.degree, out, self.bundle_rank)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, scalar):
        scalar = self.algebroid.scalar(scalar)
        out = {
            k: tuple(scalar * v for v in values) for k, values in self.coeffs.items()
        }
        return AlgForm(self.algebroid, self.degree, out, self.bundle_rank)

    def value_on(self, indices):
        """Value on a frame tuple in any order; repeats give zero."""
        sign, key = _sort_sign(indices)
        zero = self.algebroid.chart.zero()
        if sign == 0 or key not in self.coeffs:
            return tuple(zero for _ in range(self.bundle_rank))
        values = self.coeffs[key]
        if sign == 1:
            return values
        return tuple(-v for v in values)

    def wedge(self, other: "AlgForm") -> "AlgForm":
        if self.algebroid is not other.algebroid:
            raise ValueError("forms live on different algebroids")
        if self.bundle_rank != 1 and other.bundle_rank != 1:
            raise ValueError("wedge needs at least one scalar-valued factor")
        rank = self.algebroid.rank
        degree = self.degree + other.degree
        out_rank = max(self.bundle_rank, other.bundle_rank)
        if degree > rank:
            return AlgForm.zero(self.algebroid, rank, out_rank)
        out = {}
        for left, lv in self.coeffs.items():
            for right, rv in other.coeffs.items():
                sign, key = _sort_sign(left + right)
                if sign == 0:
                    continue
                if self.bundle_rank == 1:
                    values = [lv[0] * v for v in rv]
                else:
                    values = [v * rv[0] for v in lv]
                if sign < 0:
                    values = [-v for v in values]
                if key in out:
                    out[key] = [a + b for a, b in zip(out[key], values)]
                else:
                    out[key] = values
        return AlgForm(self.algebroid, degree, out, out_rank)

    def is_zero(self) -> bool:
        return all(v.is_zero() for values in self.coeffs.values() for v in values)

    def __eq__(self, other):
        if not isinstance(other, AlgForm):
            return NotImplemented
        if self.algebroid is not other.algebroid or self.bundle_rank != other.bundle_rank:
            return False
        return (self - other).is_zero() if self.degree == other.degree else (
            self.is_zero() and other.is_zero()
        )

    __hash__ = None

    def is_constant(self) -> bool:
        return all(v.is_constant() for values in self.coeffs.values() for v in values)

    def __str__(self):
        if not self.coeffs:
            return "0"
        pieces = []
        for indices in sorted(self.coeffs):
            values = self.coeffs[indices]
            basis = "^".join(f"e{i + 1}" for i in indices) or "1"
            body = (
                str(values[0])
                if self.bundle_rank == 1
                else "(" + ", ".join(str(v) for v in values) + ")"
            )
            pieces.append(f"({body})*{basis}" if basis != "1" else body)
        return " + ".join(pieces)

    def __repr__(self):
        return f"AlgForm(deg={self.degree}, {self})"


def wedge(a: AlgForm, b: AlgForm) -> AlgForm:
    return a.wedge(b)


def basis_forms(algebroid, degree, bundle_rank=1):
    """All basis forms of a degree (times bundle basis vectors)."""
    out = []
    for indices in combinations(range(algebroid.rank), degree):
        for j in range(bundle_rank):
            values = tuple(
                algebroid.chart.one() if i == j else algebroid.chart.zero()
                for i in range(bundle_rank)
            )
            out.append(AlgForm(algebroid, degree, {indices: values}, bundle_rank))
    return out


class MixedForm:
    """An inhomogeneous form: one AlgForm per occurring degree."""

    def __init__(self, algebroid, components=None, bundle_rank=1):
        self.algebroid = algebroid
        self.bundle_rank = bundle_rank
        self.components = {}
        for degree, form in (components or {}).items():
            if form.is_zero():
                continue
            self.components[int(degree)] = form

    @classmethod
    def from_form(cls, form: AlgForm):
        return cls(form.algebroid, {form.degree: form}, form.bundle_rank)

    @classmethod
    def constant(cls, algebroid, value):
        return cls.from_form(AlgForm.constant(algebroid, value))

    def degree_part(self, degree) -> AlgForm:
        return self.components.get(
            degree, AlgForm.zero(self.algebroid, min(degree, self.algebroid.rank), self.bundle_rank)
        )

    def degrees(self):
        return sorted(self.components)

    def __add__(self, other):
        if isinstance(other, AlgForm):
            other = MixedForm.from_form(other)
        out = dict(self.components)
        for degree, form in other.components.items():
            out[degree] = out[degree] + form if degree in out else form
        return MixedForm(self.algebroid, out, self.bundle_rank)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, scalar):
        return MixedForm(
            self.algebroid,
            {d: f.scale(scalar) for d, f in self.components.items()},
            self.bundle_rank,
        )

    def wedge(self, other):
        if isinstance(other, AlgForm):
            other = MixedForm.from_form(other)
        total = MixedForm(self.algebroid, {}, max(self.bundle_rank, other.bundle_rank))
        for da, fa in self.components.items():
            for db, fb in other.components.items():
                if da + db > self.algebroid.rank:
                    continue
                total = total + fa.wedge(fb)
        return total

    def truncate(self, max_degree):
        return MixedForm(
            self.algebroid,
            {d: f for d, f in self.components.items() if d <= max_degree},
            self.bundle_rank,
        )

    def is_zero(self):
        return all(f.is_zero() for f in self.components.values())

    def __eq__(self, other):
        if isinstance(other, AlgForm):
            other = MixedForm.from_form(other)
        if not isinstance(other, MixedForm):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __str__(self):
        if not self.components:
            return "0"
        return "  +  ".join(f"[deg {d}] {f}" for d, f in sorted(self.components.items()))

    def __repr__(self):
        return f"MixedForm({self})"


# ---------------------------------------------------------------------------
# connections-as-representations and the differential
# ---------------------------------------------------------------------------


class Representation:
    """Connection coefficient matrices declaring nabla_{e_a} s = rho(e_a)s + w_a s.

    A representation is a flat connection; flatness is checked by the
    curvature operation (see chern_weil.validate_representation) and is a
    precondition for d o d = 0 on bundle-valued forms.
    """

    def __init__(self, algebroid, bundle_rank=1, matrices=None):
        self.algebroid = algebroid
        self.bundle_rank = int(bundle_rank)
        if matrices is None:
            zero = algebroid.chart.zero()
            matrices = [
                [[zero] * self.bundle_rank for _ in range(self.bundle_rank)]
                for _ in range(algebroid.rank)
            ]
        self.matrices = [
            [[algebroid.scalar(v) for v in row] for row in mat] for mat in matrices
        ]
        if len(self.matrices) != algebroid.rank:
            raise ValueError("need one coefficient matrix per frame element")

    @classmethod
    def trivial(cls, algebroid, bundle_rank=1):
        return cls(algebroid, bundle_rank)

    def apply(self, frame_index, values):
        """nabla_{e_a} on a coefficient vector of sections."""
        A = self.algebroid
        mat = self.matrices[frame_index]
        out = []
        for j in range(self.bundle_rank):
            term = A.anchor_apply(frame_index, values[j])
            for l in range(self.bundle_rank):
                if not mat[j][l].is_zero():
                    term = term + mat[j][l] * values[l]
            out.append(term)
        return tuple(out)


def d_g(form: AlgForm, rep: Representation | None = None) -> AlgForm:
    """The Koszul differential of a form with respect to a connection."""
    A = form.algebroid
    if rep is None:
        rep = Representation.trivial(A, form.bundle_rank)
    if rep.algebroid is not A:
        raise ValueError("form and representation live on different algebroids")
    if rep.bundle_rank != form.bundle_rank:
        raise ValueError("bundle ranks of form and representation differ")
    k = form.degree
    if k >= A.rank:
        return AlgForm.zero(A, A.rank, form.bundle_rank)
    zero = A.chart.zero()
    out = {}
    for T in combinations(range(A.rank), k + 1):
        total = [zero] * form.bundle_rank
        for i, alpha in enumerate(T):
            rest = T[:i] + T[i + 1 :]
            nabla = rep.apply(alpha, form.value_on(rest))
            if i % 2 == 0:
                total = [t + v for t, v in zip(total, nabla)]
            else:
                total = [t - v for t, v in zip(total, nabla)]
        for i in range(k + 1):
            for j in range(i + 1, k + 1):
                rest = tuple(T[l] for l in range(k + 1) if l != i and l != j)
                coeffs = A.bracket(T[i], T[j])
                for gamma in range(A.rank):
                    if coeffs[gamma].is_zero():
                        continue
                    values = form.value_on((gamma,) + rest)
                    sign = 1 if (i + j) % 2 == 0 else -1
                    for l in range(form.bundle_rank):
                        term = coeffs[gamma] * values[l]
                        total[l] = total[l] + term if sign > 0 else total[l] - term
        if any(not t.is_zero() for t in total):
            out[T] = tuple(total)
    return AlgForm(A, k + 1, out, form.bundle_rank)


def d_mixed(form: MixedForm, rep=None) -> MixedForm:
    out = MixedForm(form.algebroid, {}, form.bundle_rank)
    for _, part in form.components.items():
        out = out + d_g(part, rep)
    return out


# ---------------------------------------------------------------------------
# pull-back of forms along morphisms
# ---------------------------------------------------------------------------


def _scalar_det(rows, chart):
    """Determinant of a small matrix of chart scalars (Leibniz expansion)."""
    n = len(rows)
    if n == 0:
        return chart.one()
    from itertools import permutations

    total = chart.zero()
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = chart.one()
        for i in range(n):
            term = term * rows[i][perm[i]]
        total = total + term if sign > 0 else total - term
    return total


def pullback_form(morphism: AlgebroidMorphism, form: AlgForm) -> AlgForm:
    """(f, phi)* of a scalar-valued form; commutes with the differential."""
    if form.algebroid is not morphism.target:
        raise ValueError("form does not live on the morphism target")
    if form.bundle_rank != 1:
        raise ValueError("pull-back is implemented for scalar-valued forms")
    src = morphism.source
    k = form.degree
    if k > src.rank:
        return AlgForm.zero(src, src.rank)
    phi = morphism.bundle_map
    out = {}
    for alpha in combinations(range(src.rank), k):
        value = src.chart.zero()
        for beta, coeff in form.coeffs.items():
            rows = [[phi[a][b] for b in beta] for a in alpha]
            minor = _scalar_det(rows, src.chart)
            if not minor.is_zero():
                value = value + morphism.compose_scalar(coeff[0]) * minor
        if not value.is_zero():
            out[alpha] = (value,)
    return AlgForm(src, k, out)


def pullback_mixed(morphism, form: MixedForm) -> MixedForm:
    out = MixedForm(morphism.source, {})
    for _, part in form.components.items():
        out = out + pullback_form(morphism, part)
    return out


# ---------------------------------------------------------------------------
# cohomology in the constant-coefficient case
# ---------------------------------------------------------------------------


def _constant_checks(algebroid, rep):
    if algebroid.base_dim != 0:
        raise ValueError("constant-coefficient cohomology needs base_dim = 0")
    for (_, _), coeffs in algebroid.structure.items():
        for c in coeffs:
            if not c.is_constant():
                raise ValueError("non-constant structure functions")
    for mat in rep.matrices:
        for row in mat:
            for v in row:
                if not v.is_constant():
                    raise ValueError("non-constant representation matrices")


def _differential_matrix(algebroid, rep, degree):
    """Matrix of d on the (tuple, bundle-index) basis, exact rationals."""
    m = rep.bundle_rank
    rows_basis = list(combinations(range(algebroid.rank), degree + 1))
    cols_basis = list(combinations(range(algebroid.rank), degree))
    matrix = [
        [Fraction(0)] * (len(cols_basis) * m) for _ in range(len(rows_basis) * m)
    ]
    for col, T in enumerate(cols_basis):
        for j in range(m):
            values = tuple(
                algebroid.chart.one() if l == j else algebroid.chart.zero()
                for l in range(m)
            )
            image = d_g(AlgForm(algebroid, degree, {T: values}, m), rep)
            for S, vals in image.coeffs.items():
                row = rows_basis.index(S)
                for l in range(m):
                    matrix[row * m + l][col * m + j] = vals[l].constant_value()
    return matrix


def cohomology_const(algebroid, rep=None, max_degree=None):
    """Betti numbers of the constant-coefficient complex, exact ranks."""
    rep = rep or Representation.trivial(algebroid)
    _constant_checks(algebroid, rep)
    r = algebroid.rank
    max_degree = r if max_degree is None else min(max_degree, r)
    m = rep.bundle_rank
    dims = [len(list(combinations(range(r), k))) * m for k in range(max_degree + 1)]
    ranks = []
    for k in range(max_degree + 1):
        if k == r:
            ranks.append(0)
        else:
            ranks.append(linalg.rank(_differential_matrix(algebroid, rep, k)))
    betti = []
    for k in range(max_degree + 1):
        kernel = dims[k] - ranks[k]
        image_prev = ranks[k - 1] if k > 0 else 0
        betti.append(kernel - image_prev)
    return betti


def is_cocycle(form: AlgForm, rep=None) -> bool:
    return d_g(form, rep).is_zero()


def coboundary_witness(form: AlgForm, rep=None, ansatz_degree=None):
    """Search for beta with d beta = form.

    In the constant case this solves the exact linear system and the answer
    is definitive.  Over a chart it searches polynomial coefficients up to
    ``ansatz_degree`` and returning None then only means "not found within
    the ansatz", never "not exact".
    """
    A = form.algebroid
    rep = rep or Representation.trivial(A, form.bundle_rank)
    if form.degree == 0:
        return None
    k = form.degree - 1
    if A.base_dim == 0 and form.is_constant():
        candidates = basis_forms(A, k, form.bundle_rank)
    else:
        if ansatz_degree is None:
            raise ValueError("chart-case coboundary search needs an ansatz degree")
        monomials = _monomials_up_to(A.chart, ansatz_degree)
        candidates = [
            base.scale(mono)
            for base in basis_forms(A, k, form.bundle_rank)
            for mono in monomials
        ]
    images = [d_g(c, rep) for c in candidates]
    equations, rhs = _match_coefficients(images, form)
    solution = linalg.solve(equations, rhs)
    if solution is None:
        return None
    witness = AlgForm.zero(A, k, form.bundle_rank)
    for coeff, candidate in zip(solution, candidates):
        if coeff:
            witness = witness + candidate.scale(coeff)
    return witness


def _monomials_up_to(chart, degree):
    from itertools import product as iproduct

    out = []
    for expo in iproduct(range(degree + 1), repeat=chart.dim):
        if sum(expo) <= degree:
            mono = chart.one()
            for i, e in enumerate(expo):
                for _ in range(e):
                    mono = mono * chart.coord(i)
            out.append(mono)
    return out


def _match_coefficients(images, target):
    """Linear system rows: one per (tuple, bundle index, monomial)."""
    keys = set()
    table = []
    for image in images:
        flat = {}
        for T, values in image.coeffs.items():
            for j, v in enumerate(values):
                for expo, c in _poly_terms(v):
                    flat[(T, j, expo)] = flat.get((T, j, expo), Fraction(0)) + c
                    keys.add((T, j, expo))
        table.append(flat)
    tflat = {}
    for T, values in target.coeffs.items():
        for j, v in enumerate(values):
            for expo, c in _poly_terms(v):
                tflat[(T, j, expo)] = tflat.get((T, j, expo), Fraction(0)) + c
                keys.add((T, j, expo))
    keys = sorted(keys)
    matrix = [[table[c].get(key, Fraction(0)) for c in range(len(images))] for key in keys]
    rhs = [tflat.get(key, Fraction(0)) for key in keys]
    return matrix, rhs


def _poly_terms(scalar):
    from .scalars import PolyScalar

    if isinstance(scalar, PolyScalar):
        return list(scalar.terms.items())
    if scalar.is_constant():
        value = scalar.constant_value()
        expo = (0,) * len(scalar.vars)
        return [(expo, value)] if value else []
    raise ValueError("exact coefficient matching needs polynomial scalars")
