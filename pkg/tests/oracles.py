"""Independent oracles used to freeze expected values.

Everything here is deliberately self-contained: the Chevalley-Eilenberg rank
oracle builds differential matrices straight from structure constants with
its own sign bookkeeping and its own row reduction, the Euler-characteristic
oracle counts simplices, and the determinant expansion used against the
Pfaffian is a direct Leibniz sum.  None of it calls the library paths it is
used to check.
"""

from fractions import Fraction
from itertools import combinations, permutations


def row_reduce_rank(matrix):
    """Rank over the rationals by plain Gaussian elimination."""
    rows = [[Fraction(v) for v in row] for row in matrix]
    rank = 0
    n_cols = len(rows[0]) if rows else 0
    for col in range(n_cols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = Fraction(1) / rows[rank][col]
        rows[rank] = [v * inv for v in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                factor = rows[i][col]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def _perm_sign(seq):
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def ce_differential_matrix(structure_constants, rank, degree):
    """Matrix of the Chevalley-Eilenberg differential on basis forms.

    ``structure_constants[(a, b)][c]`` = coefficient of e_c in [e_a, e_b]
    for a < b (ints/Fractions).  Built by direct evaluation of

        (d w)(X_0..X_k) = sum_{i<j} (-1)^{i+j} w([X_i,X_j], rest)

    on every increasing tuple, without any shared form machinery.
    """

    def bracket(a, b):
        if a == b:
            return {}
        if a < b:
            pairs = structure_constants.get((a, b), {})
            return dict(pairs) if isinstance(pairs, dict) else {
                c: v for c, v in enumerate(pairs) if v
            }
        flipped = bracket(b, a)
        return {c: -v for c, v in flipped.items()}

    domain = list(combinations(range(rank), degree))
    codomain = list(combinations(range(rank), degree + 1))
    matrix = [[Fraction(0)] * len(domain) for _ in codomain]
    for row, T in enumerate(codomain):
        for i in range(len(T)):
            for j in range(i + 1, len(T)):
                rest = tuple(T[l] for l in range(len(T)) if l not in (i, j))
                for c, coeff in bracket(T[i], T[j]).items():
                    args = (c,) + rest
                    if len(set(args)) != len(args):
                        continue
                    col = domain.index(tuple(sorted(args)))
                    sign = (-1) ** (i + j) * _perm_sign(args)
                    matrix[row][col] += Fraction(sign) * Fraction(coeff)
    return matrix


def ce_betti_numbers(structure_constants, rank):
    """Betti numbers of a Lie algebra from raw differential matrices."""
    dims = [len(list(combinations(range(rank), k))) for k in range(rank + 1)]
    ranks = []
    for k in range(rank + 1):
        if k == rank:
            ranks.append(0)
        else:
            ranks.append(row_reduce_rank(ce_differential_matrix(structure_constants, rank, k)))
    betti = []
    for k in range(rank + 1):
        image_prev = ranks[k - 1] if k else 0
        betti.append(dims[k] - ranks[k] - image_prev)
    return betti


def euler_characteristic(faces):
    """V - E + F of a triangulated closed surface given as vertex triples."""
    vertices = set()
    edges = set()
    for face in faces:
        a, b, c = face
        vertices.update(face)
        edges.add(frozenset((a, b)))
        edges.add(frozenset((b, c)))
        edges.add(frozenset((a, c)))
    return len(vertices) - len(edges) + len(faces)


def octahedron_faces():
    """The standard octahedral triangulation of the 2-sphere."""
    top, bottom = "N", "S"
    ring = ["E0", "E1", "E2", "E3"]
    faces = []
    for i in range(4):
        a, b = ring[i], ring[(i + 1) % 4]
        faces.append((top, a, b))
        faces.append((bottom, a, b))
    return faces


def leibniz_determinant(entries, mul, add, zero):
    """Determinant by the permutation sum, over any commutative product."""
    n = len(entries)
    total = zero
    for perm in permutations(range(n)):
        term = None
        for i in range(n):
            term = entries[i][perm[i]] if term is None else mul(term, entries[i][perm[i]])
        if _perm_sign(perm) < 0:
            term = -term
        total = add(total, term)
    return total


def central_difference(f, point, index, h=1e-6):
    plus = list(point)
    minus = list(point)
    plus[index] += h
    minus[index] -= h
    return (f(plus) - f(minus)) / (2 * h)
