"""Exact integer and rational linear algebra on lists of rows.

Matrices are plain ``list[list[int]]`` (or Fractions where noted). Nothing here
touches floating point. Pivot choice is always "first nonzero entry in
row-major scan order" so results are reproducible.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt, prod
from typing import Sequence

from ..errors import DimensionError, InvariantViolation

IntMatrix = list[list[int]]


def _shape(m: Sequence[Sequence]) -> tuple[int, int]:
    rows = len(m)
    cols = len(m[0]) if rows else 0
    if any(len(r) != cols for r in m):
        raise DimensionError("ragged matrix")
    return rows, cols


def _require_square(m: Sequence[Sequence]) -> int:
    r, c = _shape(m)
    if r != c:
        raise DimensionError(f"expected a square matrix, got {r}x{c}")
    return r


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    ra, ca = _shape(a)
    rb, cb = _shape(b)
    if ra and rb and ca != rb:
        raise DimensionError(f"cannot multiply {ra}x{ca} by {rb}x{cb}")
    cols = list(zip(*b)) if rb else []
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in a]


def transpose(m: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*m)]


def hadamard_bound_sq(m: Sequence[Sequence[int]]) -> int:
    """Square of Hadamard's bound: the product of squared row norms."""
    return prod(sum(x * x for x in row) for row in m)


def _bareiss(m: Sequence[Sequence[int]]) -> int:
    n = len(m)
    a = [list(map(int, row)) for row in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        piv = a[k][k]
        for i in range(k + 1, n):
            row_i, row_k = a[i], a[k]
            aik = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * piv - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = piv
    return sign * a[n - 1][n - 1] if n else 1


def det_fraction_free(m: Sequence[Sequence[int]]) -> int:
    """Exact determinant by Bareiss elimination; checked against Hadamard.

    >>> det_fraction_free([[-2, -1], [-4, -1]])
    -2
    """
    _require_square(m)
    d = _bareiss(m)
    if d * d > hadamard_bound_sq(m):
        raise InvariantViolation("determinant exceeds Hadamard's bound")
    return d


def det_cofactor(m: Sequence[Sequence[int]]) -> int:
    """Laplace expansion along the first row. Exponential; an oracle for tiny n."""
    n = _require_square(m)
    if n == 0:
        return 1
    if n == 1:
        return m[0][0]
    total = 0
    for j, x in enumerate(m[0]):
        if x:
            minor = [row[:j] + row[j + 1 :] for row in m[1:]]
            total += (-1) ** j * x * det_cofactor(minor)
    return total


def adjugate(m: Sequence[Sequence[int]]) -> IntMatrix:
    """Transpose of the cofactor matrix, verified by ``m @ adj == det * I``."""
    n = _require_square(m)
    if n == 0:
        return []
    if n == 1:
        adj = [[1]]
    else:
        adj = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                minor = [row[:j] + row[j + 1 :] for k, row in enumerate(m) if k != i]
                adj[j][i] = (-1) ** (i + j) * _bareiss(minor)
    d = det_fraction_free(m)
    if matmul(m, adj) != [[d * int(i == j) for j in range(n)] for i in range(n)]:
        raise InvariantViolation("adjugate identity failed")
    return adj


def rank(m: Sequence[Sequence], p: int | None = None) -> int:
    """Rank over Q (``p is None``) or over F_p."""
    return len(echelon_pivots(m, p))


def echelon_pivots(m: Sequence[Sequence], p: int | None = None) -> list[int]:
    """Pivot columns of the row echelon form over Q or F_p."""
    rows, cols = _shape(m)
    if p is None:
        a = [[Fraction(x) for x in row] for row in m]
    else:
        a = [[int(x) % p for x in row] for row in m]
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        if p is None:
            inv = 1 / a[r][c]
        else:
            inv = pow(a[r][c], -1, p)
        for i in range(r + 1, rows):
            f = a[i][c] * inv
            if f:
                row_i, row_r = a[i], a[r]
                if p is None:
                    for j in range(c, cols):
                        row_i[j] -= f * row_r[j]
                else:
                    for j in range(c, cols):
                        row_i[j] = (row_i[j] - f * row_r[j]) % p
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return pivots


def independent_rows(m: Sequence[Sequence], p: int | None = None) -> list[int]:
    """Greedy scan keeping each row that increases the rank (deterministic)."""
    kept: list[int] = []
    basis: list[list] = []
    for i, row in enumerate(m):
        if rank(basis + [list(row)], p) > len(basis):
            basis.append(list(row))
            kept.append(i)
    return kept


def solve_rational(a: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """One solution of ``a x = b`` over Q (free variables set to 0), or None."""
    rows, cols = _shape(a)
    aug = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(a, b)]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    if any(all(x == 0 for x in row[:cols]) and row[cols] != 0 for row in aug):
        return None
    x = [Fraction(0)] * cols
    for i, c in enumerate(pivots):
        x[c] = aug[i][cols]
    return x


def _row_hnf(m: Sequence[Sequence[int]], track: bool) -> tuple[IntMatrix, IntMatrix]:
    """Integer row echelon form by unimodular row operations.

    Returns ``(echelon, transform)`` with ``transform @ m == echelon``; the
    zero rows of ``echelon`` sit at the bottom.
    """
    rows, cols = _shape(m)
    a = [list(map(int, row)) for row in m]
    u = identity(rows) if track else [[] for _ in range(rows)]
    r = 0
    for c in range(cols):
        if r == rows:
            break
        while True:
            nz = [i for i in range(r, rows) if a[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: (abs(a[i][c]), i))
            a[r], a[piv] = a[piv], a[r]
            u[r], u[piv] = u[piv], u[r]
            done = True
            for i in range(r + 1, rows):
                q = a[i][c] // a[r][c]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    if track:
                        u[i] = [x - q * y for x, y in zip(u[i], u[r])]
                if a[i][c] != 0:
                    done = False
            if done:
                break
        if any(a[i][c] for i in range(r, rows)):
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
                if track:
                    u[r] = [-x for x in u[r]]
            r += 1
    return a, u


def lattice_basis(gens: Sequence[Sequence[int]]) -> IntMatrix:
    """A basis (echelon rows) of the integer lattice spanned by ``gens``."""
    if not gens:
        return []
    ech, _ = _row_hnf(gens, track=False)
    return [row for row in ech if any(row)]


def kernel_basis(m: Sequence[Sequence[int]]) -> IntMatrix:
    """Rows form a basis of the full integer kernel ``{n : m n = 0}``.

    Reduces ``m^T`` with unimodular row operations; the transform rows that
    land on zero rows span the kernel primitively.
    """
    rows, cols = _shape(m)
    if cols == 0:
        return []
    if rows == 0:
        return identity(cols)
    ech, u = _row_hnf(transpose(m), track=True)
    basis = [u[i] for i in range(cols) if not any(ech[i])]
    for v in basis:
        if any(sum(x * y for x, y in zip(row, v)) for row in m):
            raise InvariantViolation("kernel vector not orthogonal to input rows")
    return basis


def integer_coordinates(basis: Sequence[Sequence[int]], v: Sequence[int]) -> list[int] | None:
    """Integer ``k`` with ``sum k_i basis_i == v``, or None if ``v`` is not in the lattice."""
    if not basis:
        return [] if not any(v) else None
    sol = solve_rational(transpose(basis), list(v))
    if sol is None or any(x.denominator != 1 for x in sol):
        return None
    k = [int(x) for x in sol]
    if [sum(ki * row[j] for ki, row in zip(k, basis)) for j in range(len(v))] != list(v):
        return None
    return k


def gram(basis: Sequence[Sequence[int]]) -> IntMatrix:
    return [[sum(x * y for x, y in zip(a, b)) for b in basis] for a in basis]


def gram_det(basis: Sequence[Sequence[int]]) -> int:
    """``det(B B^T)``, the squared lattice determinant."""
    return det_fraction_free(gram(basis)) if basis else 1


def minors_gcd(m: Sequence[Sequence[int]], k: int) -> int:
    """gcd of all ``k x k`` minors of ``m`` (0 if every minor vanishes)."""
    from itertools import combinations

    rows, cols = _shape(m)
    g = 0
    for ri in combinations(range(rows), k):
        for ci in combinations(range(cols), k):
            g = gcd(g, _bareiss([[m[i][j] for j in ci] for i in ri]))
            if g == 1:
                return 1
    return g


def first_nonsingular_submatrix(m: Sequence[Sequence[int]]) -> tuple[list[int], list[int]]:
    """Rows and columns of a maximal nonsingular square submatrix.

    Rows are chosen greedily over Q, then columns greedily among those rows;
    both scans go in index order.
    """
    rws = independent_rows(m)
    sub = [list(m[i]) for i in rws]
    cls = independent_rows(transpose(sub)) if sub else []
    return rws, cls


def isqrt_exact(n: int) -> int | None:
    r = isqrt(n)
    return r if r * r == n else None
