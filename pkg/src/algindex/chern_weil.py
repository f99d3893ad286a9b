"""Curvature, Levi-Civita connections and characteristic-class series.

Characteristic forms are produced by exact power-series manipulation of
trace/determinant formulas (power sums of the curvature matrix, never
numerical eigenvalues) and are stored WITHOUT 2*pi factors; the single
normalization happens at integration time.  A formal Chern-roots engine
(`roots_identity`) independently checks the multiplicative-genus identities
behind the Euler and signature index formulas and reports the normalization
factor they actually require.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations

from .algebroid import AlgebroidPresentation, AlgebroidMorphism
from .forms import AlgForm, MixedForm, Representation, d_g
from .scalars import Chart, PolyScalar


class GConnection:
    """Connection coefficient matrices Gamma_a on a rank-m bundle."""

    def __init__(self, algebroid: AlgebroidPresentation, bundle_rank, matrices):
        self.algebroid = algebroid
        self.bundle_rank = int(bundle_rank)
        self.matrices = [
            [[algebroid.scalar(v) for v in row] for row in mat] for mat in matrices
        ]
        if len(self.matrices) != algebroid.rank:
            raise ValueError("need one coefficient matrix per frame element")
        for mat in self.matrices:
            if len(mat) != self.bundle_rank or any(
                len(row) != self.bundle_rank for row in mat
            ):
                raise ValueError("coefficient matrices must be bundle_rank square")

    @classmethod
    def zero(cls, algebroid, bundle_rank):
        z = algebroid.chart.zero()
        mats = [
            [[z] * bundle_rank for _ in range(bundle_rank)]
            for _ in range(algebroid.rank)
        ]
        return cls(algebroid, bundle_rank, mats)

    @classmethod
    def from_representation(cls, rep: Representation):
        return cls(rep.algebroid, rep.bundle_rank, rep.matrices)

    def as_representation(self) -> Representation:
        return Representation(self.algebroid, self.bundle_rank, self.matrices)


class FormMatrix:
    """A square matrix of even-degree forms on a common algebroid."""

    def __init__(self, algebroid, entries):
        self.algebroid = algebroid
        self.entries = entries
        self.size = len(entries)
        for row in entries:
            if len(row) != self.size:
                raise ValueError("form matrix must be square")
            for form in row:
                if form.algebroid is not algebroid:
                    raise ValueError("entries live on different algebroids")
                if form.degree % 2 and not form.is_zero():
                    raise ValueError("form matrix entries must have even degree")

    @classmethod
    def zero(cls, algebroid, size, degree=2):
        z = AlgForm.zero(algebroid, degree)
        return cls(algebroid, [[z] * size for _ in range(size)])

    def matmul(self, other: "FormMatrix") -> "FormMatrix":
        out = []
        for i in range(self.size):
            row = []
            for j in range(self.size):
                acc = None
                for k in range(self.size):
                    term = self.entries[i][k].wedge(other.entries[k][j])
                    acc = term if acc is None else acc + term
                row.append(acc)
            out.append(row)
        return FormMatrix(self.algebroid, out)

    def trace(self) -> AlgForm:
        acc = self.entries[0][0]
        for i in range(1, self.size):
            acc = acc + self.entries[i][i]
        return acc

    def transpose(self):
        return FormMatrix(
            self.algebroid,
            [[self.entries[j][i] for j in range(self.size)] for i in range(self.size)],
        )

    def add(self, other):
        return FormMatrix(
            self.algebroid,
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ],
        )

    def is_zero(self):
        return all(f.is_zero() for row in self.entries for f in row)

    def __repr__(self):
        return f"FormMatrix({self.size}x{self.size} on {self.algebroid.name})"


class Metric:
    """A symmetric scalar matrix on the frame, assumed positive definite."""

    def __init__(self, algebroid, entries):
        self.algebroid = algebroid
        self.entries = [[algebroid.scalar(v) for v in row] for row in entries]
        r = algebroid.rank
        if len(self.entries) != r or any(len(row) != r for row in self.entries):
            raise ValueError("metric must be rank x rank")
        for i in range(r):
            for j in range(i + 1, r):
                if not (self.entries[i][j] - self.entries[j][i]).is_zero():
                    raise ValueError(f"metric not symmetric at {(i, j)}")

    @classmethod
    def identity(cls, algebroid):
        one, zero = algebroid.chart.one(), algebroid.chart.zero()
        r = algebroid.rank
        return cls(algebroid, [[one if i == j else zero for j in range(r)] for i in range(r)])

    @classmethod
    def conformal(cls, algebroid, factor):
        factor = algebroid.scalar(factor)
        zero = algebroid.chart.zero()
        r = algebroid.rank
        return cls(
            algebroid,
            [[factor if i == j else zero for j in range(r)] for i in range(r)],
        )

    def is_conformal(self):
        r = self.algebroid.rank
        f = self.entries[0][0]
        for i in range(r):
            for j in range(r):
                expected = f if i == j else self.algebroid.chart.zero()
                if not (self.entries[i][j] - expected).is_zero():
                    return None
        return f

    def determinant(self):
        return _scalar_det(self.entries, self.algebroid.chart)

    def inverse(self):
        """Exact inverse via the adjugate; fails if the determinant is zero."""
        chart = self.algebroid.chart
        det = self.determinant()
        if det.is_zero():
            raise ValueError("metric is symbolically singular")
        r = self.algebroid.rank
        out = []
        for i in range(r):
            row = []
            for j in range(r):
                minor = [
                    [self.entries[a][b] for b in range(r) if b != i]
                    for a in range(r)
                    if a != j
                ]
                cof = _scalar_det(minor, chart)
                if (i + j) % 2:
                    cof = -cof
                row.append(cof / det)
            out.append(row)
        return out

    def check_positive_definite(self, sample_points=None):
        """Leading minors for constant metrics, sampling otherwise."""
        constant = all(v.is_constant() for row in self.entries for v in row)
        if constant:
            from . import linalg

            numeric = [[v.constant_value() for v in row] for row in self.entries]
            for k in range(1, self.algebroid.rank + 1):
                minor = [row[:k] for row in numeric[:k]]
                if linalg.det(minor) <= 0:
                    return False
            return True
        points = sample_points or [
            tuple(Fraction(s, 7) for s in range(1, self.algebroid.base_dim + 1))
        ]
        for point in points:
            numeric = [[float(v.eval(point)) for v in row] for row in self.entries]
            for k in range(1, self.algebroid.rank + 1):
                det = _float_det([row[:k] for row in numeric[:k]])
                if det <= 0:
                    return False
        return True


def _float_det(rows):
    n = len(rows)
    rows = [list(r) for r in rows]
    out = 1.0
    for c in range(n):
        pivot = max(range(c, n), key=lambda i: abs(rows[i][c]))
        if rows[pivot][c] == 0.0:
            return 0.0
        if pivot != c:
            rows[c], rows[pivot] = rows[pivot], rows[c]
            out = -out
        out *= rows[c][c]
        for i in range(c + 1, n):
            f = rows[i][c] / rows[c][c]
            rows[i] = [v - f * w for v, w in zip(rows[i], rows[c])]
    return out


def _scalar_det(rows, chart):
    n = len(rows)
    if n == 0:
        return chart.one()
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


# ---------------------------------------------------------------------------
# curvature and the Levi-Civita connection
# ---------------------------------------------------------------------------


def curvature(conn: GConnection) -> FormMatrix:
    """R_ab = d_rho(e_a) Gamma_b - d_rho(e_b) Gamma_a + [Gamma_a, Gamma_b] - C^c_ab Gamma_c."""
    A = conn.algebroid
    m = conn.bundle_rank
    zero = A.chart.zero()
    component = {}
    for a in range(A.rank):
        for b in range(a + 1, A.rank):
            mat = [[zero] * m for _ in range(m)]
            ga, gb = conn.matrices[a], conn.matrices[b]
            bracket = A.bracket(a, b)
            for i in range(m):
                for j in range(m):
                    value = A.anchor_apply(a, gb[i][j]) - A.anchor_apply(b, ga[i][j])
                    for k in range(m):
                        value = value + ga[i][k] * gb[k][j] - gb[i][k] * ga[k][j]
                    for c in range(A.rank):
                        if not bracket[c].is_zero():
                            value = value - bracket[c] * conn.matrices[c][i][j]
                    mat[i][j] = value
            component[(a, b)] = mat
    entries = []
    for i in range(m):
        row = []
        for j in range(m):
            coeffs = {}
            for key, mat in component.items():
                if not mat[i][j].is_zero():
                    coeffs[key] = (mat[i][j],)
            row.append(AlgForm(A, 2 if A.rank >= 2 else A.rank, coeffs))
        entries.append(row)
    return FormMatrix(A, entries)


def validate_representation(rep: Representation):
    """Flatness check: the curvature of the declared connection vanishes."""
    return curvature(GConnection.from_representation(rep)).is_zero()


def levi_civita(A: AlgebroidPresentation, metric: Metric) -> GConnection:
    """The unique metric, torsion-free connection on the algebroid itself."""
    if metric.algebroid is not A:
        raise ValueError("metric lives on a different algebroid")
    r = A.rank
    g = metric.entries
    ginv = metric.inverse()

    def inner_bracket(a, b, c):
        # <[e_a, e_b], e_c>
        out = A.chart.zero()
        for d, coeff in enumerate(A.bracket(a, b)):
            if not coeff.is_zero():
                out = out + coeff * g[d][c]
        return out

    # 2<nabla_a e_b, e_c> by the Koszul formula
    koszul = {}
    for a in range(r):
        for b in range(r):
            for c in range(r):
                value = (
                    A.anchor_apply(a, g[b][c])
                    + A.anchor_apply(b, g[a][c])
                    - A.anchor_apply(c, g[a][b])
                    + inner_bracket(a, b, c)
                    - inner_bracket(a, c, b)
                    - inner_bracket(b, c, a)
                )
                koszul[(a, b, c)] = value
    mats = []
    for a in range(r):
        mat = [[A.chart.zero()] * r for _ in range(r)]
        for b in range(r):
            for c in range(r):
                value = A.chart.zero()
                for d in range(r):
                    value = value + ginv[c][d] * koszul[(a, b, d)]
                mat[c][b] = value / 2
        mats.append(mat)
    return GConnection(A, r, mats)


def torsion_residuals(conn: GConnection):
    """nabla_a e_b - nabla_b e_a - [e_a, e_b], per frame pair."""
    A = conn.algebroid
    out = {}
    for a in range(A.rank):
        for b in range(a + 1, A.rank):
            bracket = A.bracket(a, b)
            res = []
            for c in range(A.rank):
                res.append(
                    conn.matrices[a][c][b] - conn.matrices[b][c][a] - bracket[c]
                )
            if any(not v.is_zero() for v in res):
                out[(a, b)] = res
    return out


def metric_residuals(conn: GConnection, metric: Metric):
    """rho(e_a)<e_b,e_c> - <nabla_a e_b, e_c> - <e_b, nabla_a e_c>."""
    A = conn.algebroid
    g = metric.entries
    out = {}
    for a in range(A.rank):
        for b in range(A.rank):
            for c in range(A.rank):
                value = A.anchor_apply(a, g[b][c])
                for d in range(A.rank):
                    value = value - conn.matrices[a][d][b] * g[d][c]
                    value = value - conn.matrices[a][d][c] * g[b][d]
                if not value.is_zero():
                    out[(a, b, c)] = value
    return out


def connection_pullback(morphism: AlgebroidMorphism, conn: GConnection) -> GConnection:
    """Pull a g-connection back along a morphism (bundle kept trivialized)."""
    if conn.algebroid is not morphism.target:
        raise ValueError("connection does not live on the morphism target")
    src = morphism.source
    m = conn.bundle_rank
    mats = []
    for a in range(src.rank):
        mat = [[src.chart.zero()] * m for _ in range(m)]
        for b in range(morphism.target.rank):
            coeff = morphism.bundle_map[a][b]
            if coeff.is_zero():
                continue
            for i in range(m):
                for j in range(m):
                    mat[i][j] = mat[i][j] + coeff * morphism.compose_scalar(
                        conn.matrices[b][i][j]
                    )
        mats.append(mat)
    return GConnection(src, m, mats)


def direct_sum(c1: GConnection, c2: GConnection) -> GConnection:
    if c1.algebroid is not c2.algebroid:
        raise ValueError("connections live on different algebroids")
    A = c1.algebroid
    z = A.chart.zero()
    m1, m2 = c1.bundle_rank, c2.bundle_rank
    mats = []
    for a in range(A.rank):
        mat = [[z] * (m1 + m2) for _ in range(m1 + m2)]
        for i in range(m1):
            for j in range(m1):
                mat[i][j] = c1.matrices[a][i][j]
        for i in range(m2):
            for j in range(m2):
                mat[m1 + i][m1 + j] = c2.matrices[a][i][j]
        mats.append(mat)
    return GConnection(A, m1 + m2, mats)


def tensor_product(c1: GConnection, c2: GConnection) -> GConnection:
    if c1.algebroid is not c2.algebroid:
        raise ValueError("connections live on different algebroids")
    A = c1.algebroid
    z = A.chart.zero()
    m1, m2 = c1.bundle_rank, c2.bundle_rank
    mats = []
    for a in range(A.rank):
        mat = [[z] * (m1 * m2) for _ in range(m1 * m2)]
        for i in range(m1):
            for j in range(m1):
                for k in range(m2):
                    for l in range(m2):
                        value = z
                        if k == l:
                            value = value + c1.matrices[a][i][j]
                        if i == j:
                            value = value + c2.matrices[a][k][l]
                        mat[i * m2 + k][j * m2 + l] = value
        mats.append(mat)
    return GConnection(A, m1 * m2, mats)


def covariant_exterior_derivative(R: FormMatrix, conn: GConnection) -> AlgForm:
    """d^nabla of an End-valued form, flattened to bundle rank m^2."""
    A = conn.algebroid
    m = conn.bundle_rank
    z = A.chart.zero()
    end_mats = []
    for a in range(A.rank):
        gamma = conn.matrices[a]
        mat = [[z] * (m * m) for _ in range(m * m)]
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    # (Gamma S - S Gamma)_{ij} = Gamma_{ik} S_{kj} - S_{ik} Gamma_{kj}
                    mat[i * m + j][k * m + j] = mat[i * m + j][k * m + j] + gamma[i][k]
                    mat[i * m + j][i * m + k] = mat[i * m + j][i * m + k] - gamma[k][j]
        end_mats.append(mat)
    end_rep = Representation(A, m * m, end_mats)
    degree = None
    coeffs = {}
    for i in range(m):
        for j in range(m):
            form = R.entries[i][j]
            if form.is_zero():
                continue
            degree = form.degree if degree is None else degree
            if form.degree != degree:
                raise ValueError("mixed-degree form matrix")
            for T, values in form.coeffs.items():
                vec = list(coeffs.get(T, [z] * (m * m)))
                vec[i * m + j] = vec[i * m + j] + values[0]
                coeffs[T] = vec
    if degree is None:
        return AlgForm.zero(A, 0, m * m)
    flattened = AlgForm(A, degree, {k: tuple(v) for k, v in coeffs.items()}, m * m)
    return d_g(flattened, end_rep)


# ---------------------------------------------------------------------------
# exact univariate series (Fraction coefficient lists)
# ---------------------------------------------------------------------------


def _s_mul(a, b, n):
    out = [Fraction(0)] * (n + 1)
    for i, ai in enumerate(a[: n + 1]):
        if ai == 0:
            continue
        for j, bj in enumerate(b[: n + 1 - i]):
            if bj:
                out[i + j] += ai * bj
    return out


def _s_div(a, b, n):
    if b[0] == 0:
        raise ZeroDivisionError("series division needs a unit constant term")
    out = [Fraction(0)] * (n + 1)
    for k in range(n + 1):
        acc = a[k] if k < len(a) else Fraction(0)
        for j in range(k):
            idx = k - j
            if idx < len(b) and b[idx]:
                acc -= out[j] * b[idx]
        out[k] = acc / b[0]
    return out


def _s_log(a, n):
    """log of a series with constant term 1."""
    if a[0] != 1:
        raise ValueError("series log needs constant term 1")
    da = [a[k] * k for k in range(1, len(a))]
    q = _s_div(da, a, max(n - 1, 0))
    out = [Fraction(0)] * (n + 1)
    for k in range(1, n + 1):
        out[k] = q[k - 1] / k
    return out


def _s_exp_of(a, n):
    """exp of a series with constant term 0."""
    if a[0] != 0:
        raise ValueError("series exp needs constant term 0")
    out = [Fraction(0)] * (n + 1)
    out[0] = Fraction(1)
    for k in range(1, n + 1):
        acc = Fraction(0)
        for j in range(1, k + 1):
            if j < len(a) and a[j]:
                acc += j * a[j] * out[k - j]
        out[k] = acc / k
    return out


def _fact(k):
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def _exp_series(n, sign=1):
    return [Fraction(sign**k, _fact(k)) for k in range(n + 1)]


def todd_root_series(n):
    """x/(1 - e^{-x}) = 1 + x/2 + x^2/12 - ..."""
    body = [Fraction(0)] * (n + 2)
    for k in range(1, n + 2):
        body[k] = -Fraction((-1) ** k, _fact(k))  # 1 - e^{-x}
    shifted = body[1 : n + 2]  # (1 - e^{-x})/x
    one = [Fraction(1)] + [Fraction(0)] * n
    return _s_div(one, shifted, n)


def l_root_even_series(n_z):
    """x/tanh(x) as a series in z = x^2: 1 + z/3 - z^2/45 + ..."""
    n = 2 * n_z
    sinh_over_x = [
        Fraction(1, _fact(k + 1)) if k % 2 == 0 else Fraction(0) for k in range(n + 1)
    ]
    cosh = [Fraction(1, _fact(k)) if k % 2 == 0 else Fraction(0) for k in range(n + 1)]
    ratio = _s_div(cosh, sinh_over_x, n)
    return [ratio[2 * j] for j in range(n_z + 1)]


def a_hat_root_even_series(n_z):
    """(x/2)/sinh(x/2) as a series in z = x^2: 1 - z/24 + 7 z^2/5760 - ..."""
    # sinh(x/2)/(x/2) = sum_k (z/4)^k / (2k+1)!
    body = [Fraction(1, 4**k * _fact(2 * k + 1)) for k in range(n_z + 1)]
    one = [Fraction(1)] + [Fraction(0)] * n_z
    return _s_div(one, body, n_z)


# ---------------------------------------------------------------------------
# characteristic classes of a curvature matrix
# ---------------------------------------------------------------------------

GENERA = ("chern", "ch", "todd", "l_genus", "a_hat", "pfaffian")


def _power_traces(R: FormMatrix, count):
    traces = {}
    power = R
    for j in range(1, count + 1):
        if j > 1:
            power = power.matmul(R)
        if power.is_zero():
            break
        traces[j] = power.trace()
    return traces


def _exp_mixed(argument: MixedForm) -> MixedForm:
    """exp of a positive-degree mixed form (terminates at top degree)."""
    A = argument.algebroid
    out = MixedForm.constant(A, 1)
    power = MixedForm.constant(A, 1)
    k = 1
    while True:
        power = power.wedge(argument)
        if power.is_zero():
            break
        out = out + power.scale(Fraction(1, _fact(k)))
        k += 1
    return out


def chern_class(R: FormMatrix, k: int) -> AlgForm:
    """k-th elementary invariant: sum of principal k x k wedge-minors."""
    A = R.algebroid
    if k == 0:
        return AlgForm.constant(A, 1)
    acc = AlgForm.zero(A, min(2 * k, A.rank))
    for subset in combinations(range(R.size), k):
        for perm in permutations(range(k)):
            sign = 1
            for i in range(k):
                for j in range(i + 1, k):
                    if perm[i] > perm[j]:
                        sign = -sign
            term = None
            for i in range(k):
                entry = R.entries[subset[i]][subset[perm[i]]]
                term = entry if term is None else term.wedge(entry)
                if term.is_zero():
                    break
            if term is None or term.is_zero():
                continue
            acc = acc + (term if sign > 0 else -term)
    return acc


def pontryagin_class(R: FormMatrix, k: int) -> AlgForm:
    """Degree-4k component of det(1 + R) for an antisymmetrizable R."""
    return chern_class(R, 2 * k)


def pfaffian_form(R: FormMatrix, metric: Metric | None = None) -> AlgForm:
    """Pfaffian of the metric-lowered curvature; zero (with a warning) on odd rank."""
    A = R.algebroid
    m = R.size
    if m % 2:
        warnings.warn("Pfaffian of an odd-rank matrix is zero")
        return AlgForm.zero(A, min(m, A.rank))
    metric = metric or Metric.identity(A)
    lowered = []
    for i in range(m):
        row = []
        for j in range(m):
            acc = None
            for k in range(m):
                g = metric.entries[i][k]
                if g.is_zero():
                    continue
                term = R.entries[k][j].scale(g)
                acc = term if acc is None else acc + term
            row.append(acc if acc is not None else AlgForm.zero(A, 2))
        lowered.append(row)
    for i in range(m):
        for j in range(i, m):
            if not (lowered[i][j] + lowered[j][i]).is_zero():
                raise ValueError(
                    "lowered curvature is not antisymmetric; Pfaffian needs a metric connection"
                )
    return _pfaffian(lowered, A)


def _pfaffian(entries, algebroid):
    m = len(entries)
    if m == 0:
        return AlgForm.constant(algebroid, 1)
    acc = None
    for j in range(1, m):
        entry = entries[0][j]
        if entry.is_zero():
            continue
        keep = [i for i in range(1, m) if i != j]
        sub = [[entries[a][b] for b in keep] for a in keep]
        term = entry.wedge(_pfaffian(sub, algebroid))
        if j % 2 == 0:
            term = -term
        acc = term if acc is None else acc + term
    if acc is None:
        top = min(m, algebroid.rank)
        return AlgForm.zero(algebroid, top)
    return acc


def char_class(
    source,
    genus: str,
    truncation_degree=None,
    metric: Metric | None = None,
    chern_degree=None,
) -> MixedForm:
    """Characteristic form of a connection or of an explicit curvature matrix.

    ``genus`` is one of chern / ch / todd / l_genus / a_hat / pfaffian;
    ``chern_degree`` selects c_k for the chern kind.  The result is the
    inhomogeneous form truncated at ``truncation_degree`` (top degree when
    beyond the rank).
    """
    if isinstance(source, GConnection):
        R = curvature(source)
        rank_e = source.bundle_rank
    else:
        R = source
        rank_e = R.size
    A = R.algebroid
    trunc = A.rank if truncation_degree is None else min(truncation_degree, A.rank)
    max_j = trunc // 2

    if genus == "chern":
        if chern_degree is None:
            total = MixedForm.constant(A, 1)
            for k in range(1, max_j + 1):
                total = total + chern_class(R, k)
            return total.truncate(trunc)
        return MixedForm.from_form(chern_class(R, chern_degree)).truncate(trunc)

    if genus == "ch":
        total = MixedForm.constant(A, rank_e)
        for j, t in _power_traces(R, max_j).items():
            total = total + t.scale(Fraction(1, _fact(j)))
        return total.truncate(trunc)

    if genus == "todd":
        log_coeffs = _s_log(todd_root_series(max_j), max_j)
        traces = _power_traces(R, max_j)
        argument = MixedForm(A, {})
        for j, t in traces.items():
            if j < len(log_coeffs) and log_coeffs[j]:
                argument = argument + t.scale(log_coeffs[j])
        return _exp_mixed(argument).truncate(trunc)

    if genus in ("l_genus", "a_hat"):
        n_z = max_j // 2
        even = (
            l_root_even_series(n_z) if genus == "l_genus" else a_hat_root_even_series(n_z)
        )
        beta = _s_log(even, n_z)
        traces = _power_traces(R, 2 * n_z)
        argument = MixedForm(A, {})
        for k in range(1, n_z + 1):
            t = traces.get(2 * k)
            if t is not None and beta[k]:
                scale = beta[k] * Fraction((-1) ** k, 2)
                argument = argument + t.scale(scale)
        return _exp_mixed(argument).truncate(trunc)

    if genus == "pfaffian":
        return MixedForm.from_form(pfaffian_form(R, metric)).truncate(trunc)

    raise ValueError(f"unknown genus {genus!r}")


# ---------------------------------------------------------------------------
# formal Chern-roots oracle for the index-reduction identities
# ---------------------------------------------------------------------------


@dataclass
class RootsIdentityResult:
    identity: str
    half_rank: int
    truncation: int
    # measured factor on each form-degree-2d component of the stated RHS
    factors: dict
    residual_zero: bool
    residual: object
    model: str

    def __str__(self):
        status = "residual 0" if self.residual_zero else f"RESIDUAL {self.residual}"
        facts = ", ".join(f"deg {2 * d}: {f}" for d, f in sorted(self.factors.items()))
        return (
            f"roots_identity[{self.identity}, p={self.half_rank}, "
            f"trunc={self.truncation}]: {status}; normalization {{{facts}}} ({self.model})"
        )


def _poly_truncate(p: PolyScalar, degree):
    return PolyScalar(
        p.vars, {e: c for e, c in p.terms.items() if sum(e) <= degree}
    )


def _series_at_variable(series, chart, index, degree):
    terms = {}
    for k, coeff in enumerate(series[: degree + 1]):
        if coeff:
            expo = tuple(k if i == index else 0 for i in range(chart.dim))
            terms[expo] = coeff
    return PolyScalar(chart.names, terms)


def roots_identity(identity: str, half_rank: int, truncation: int) -> RootsIdentityResult:
    """Expand an index-reduction identity in formal Chern roots.

    The complexified bundle of rank 2p has roots +-x_1..+-x_p; both sides are
    expanded exactly and LHS - factor*RHS must vanish identically.  The
    factor actually required on each graded component is measured and
    reported, never assumed.  ``truncation`` counts form degree (a root has
    form degree 2).
    """
    p = int(half_rank)
    x_deg = int(truncation) // 2
    chart = Chart(tuple(f"x{j + 1}" for j in range(p)))
    n = x_deg + 2

    exp_pos = _exp_series(n)
    exp_neg = _exp_series(n, sign=-1)
    one_minus_epos = [Fraction(1) - exp_pos[0]] + [-c for c in exp_pos[1:]]
    one_minus_eneg = [Fraction(1) - exp_neg[0]] + [-c for c in exp_neg[1:]]
    one = [Fraction(1)] + [Fraction(0)] * n
    # Todd factors for the pair of roots +-x
    td_plus = _s_div(one, one_minus_eneg[1:], n)          # x/(1-e^{-x})
    td_minus = _s_div(one, [-c for c in one_minus_epos[1:]], n)  # -x/(1-e^{x})

    if identity == "gauss_bonnet":
        ch_pair = _s_mul(one_minus_epos, one_minus_eneg, n)
        model = "(-1)^p"
    elif identity == "signature":
        ch_pair = [a - b for a, b in zip(exp_pos, exp_neg)]  # e^x - e^{-x}
        model = "2^(p - k) on the form-degree-2k component of the L-genus"
    else:
        raise ValueError(f"unknown identity {identity!r}")

    pair = _s_mul(_s_mul(ch_pair, td_plus, n), td_minus, n)
    if pair[0] != 0:
        raise AssertionError("pair series should vanish at order zero")
    pair_over_x = pair[1:]  # divide the Euler root out

    lhs = PolyScalar.const(chart.names, 1)
    for j in range(p):
        factor = _series_at_variable(pair_over_x, chart, j, x_deg)
        lhs = _poly_truncate(lhs * factor, x_deg)

    if identity == "gauss_bonnet":
        rhs = PolyScalar.const(chart.names, 1)
        for j in range(p):
            rhs = rhs * PolyScalar.coordinate(chart.names, j)
        rhs = _poly_truncate(rhs, x_deg)
    else:
        l_even = l_root_even_series(x_deg // 2 + 1)
        l_series = [Fraction(0)] * (x_deg + 1)
        for jz, c in enumerate(l_even):
            if 2 * jz <= x_deg:
                l_series[2 * jz] = c
        rhs = PolyScalar.const(chart.names, 1)
        for j in range(p):
            factor = _series_at_variable(l_series, chart, j, x_deg)
            rhs = _poly_truncate(rhs * factor, x_deg)

    factors = {}
    residual = lhs
    for d in range(x_deg + 1):
        rhs_d = PolyScalar(
            chart.names, {e: c for e, c in rhs.terms.items() if sum(e) == d}
        )
        if rhs_d.is_zero():
            continue
        lhs_d = PolyScalar(
            chart.names, {e: c for e, c in lhs.terms.items() if sum(e) == d}
        )
        expo = next(iter(rhs_d.terms))
        ratio = lhs_d.terms.get(expo, Fraction(0)) / rhs_d.terms[expo]
        if ratio:
            factors[d] = ratio
            residual = residual - rhs_d * ratio
    return RootsIdentityResult(
        identity=identity,
        half_rank=p,
        truncation=truncation,
        factors=factors,
        residual_zero=residual.is_zero(),
        residual=residual,
        model=model,
    )
