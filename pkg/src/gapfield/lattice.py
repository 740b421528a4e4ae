"""Kernel lattices of rational linear forms, reduced bases and ratio extraction."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from .errors import DomainError, InvariantViolation
from .exact.matrix import (
    adjugate,
    det_fraction_free,
    gram_det,
    integer_coordinates,
    kernel_basis,
    lattice_basis,
    rank,
)


@dataclass(frozen=True)
class LatticeBasis:
    """Independent integer rows spanning a lattice in Z^dim.

    ``gram_det`` is ``det(B B^T)``, the square of the lattice determinant.
    """

    rows: tuple[tuple[int, ...], ...]
    dim: int

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        if any(len(r) != self.dim for r in rows):
            raise DomainError("basis vector of the wrong length")
        if rows and rank([list(r) for r in rows]) != len(rows):
            raise InvariantViolation("basis rows are dependent")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "_gram_det", gram_det([list(r) for r in rows]))

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def gram_det(self) -> int:
        return self._gram_det

    @property
    def det(self) -> float:
        return math.sqrt(self.gram_det)

    def norms(self) -> list[float]:
        return [math.sqrt(sum(x * x for x in r)) for r in self.rows]

    def coordinates(self, v: Sequence[int]) -> list[int] | None:
        return integer_coordinates([list(r) for r in self.rows], list(v))

    def contains(self, v: Sequence[int]) -> bool:
        return self.coordinates(v) is not None


def kernel_lattice(alpha: Sequence) -> LatticeBasis:
    """Basis of ``{n in Z^d : sum alpha_i n_i = 0}`` for rational ``alpha``."""
    alpha = [Fraction(a) for a in alpha]
    if not any(alpha):
        raise DomainError("the zero form has no proper kernel lattice")
    den = lcm(*(a.denominator for a in alpha))
    v = [int(a * den) for a in alpha]
    g = 0
    for x in v:
        g = gcd(g, x)
    v = [x // g for x in v]
    basis = kernel_basis([v])
    for b in basis:
        if sum(a * x for a, x in zip(alpha, b)) != 0:
            raise InvariantViolation("kernel vector not orthogonal to alpha")
    return LatticeBasis(tuple(map(tuple, basis)), len(alpha))


def span_lattice(vectors: Sequence[Sequence[int]], dim: int) -> LatticeBasis:
    """Basis of the lattice generated by ``vectors``."""
    vecs = [list(v) for v in vectors if any(v)]
    return LatticeBasis(tuple(map(tuple, lattice_basis(vecs))) if vecs else (), dim)


# -- reduction ---------------------------------------------------------------


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _lll(rows: list[list[int]], delta: Fraction = Fraction(3, 4)) -> list[list[int]]:
    """Textbook LLL with exact rational Gram-Schmidt (recomputed each step)."""
    b = [list(r) for r in rows]
    n = len(b)

    def gso(b):
        bstar: list[list[Fraction]] = []
        mu = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            v = [Fraction(x) for x in b[i]]
            for j in range(i):
                mu[i][j] = Fraction(_dot(b[i], bstar[j])) / _dot(bstar[j], bstar[j])
                v = [x - mu[i][j] * y for x, y in zip(v, bstar[j])]
            bstar.append(v)
        return bstar, mu

    bstar, mu = gso(b)
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                bstar, mu = gso(b)
        lhs = _dot(bstar[k], bstar[k])
        rhs = (delta - mu[k][k - 1] ** 2) * _dot(bstar[k - 1], bstar[k - 1])
        if lhs >= rhs:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            bstar, mu = gso(b)
            k = max(k - 1, 1)
    return b


def _pairwise_improve(b: list[list[int]]) -> list[list[int]]:
    """Replace ``b_i`` by ``b_i - q b_j`` while that strictly shortens it."""
    improved = True
    while improved:
        improved = False
        for i in range(len(b)):
            for j in range(len(b)):
                if i == j:
                    continue
                nj = _dot(b[j], b[j])
                q = round(Fraction(_dot(b[i], b[j]), nj))
                if q:
                    cand = [x - q * y for x, y in zip(b[i], b[j])]
                    if _dot(cand, cand) < _dot(b[i], b[i]):
                        b[i] = cand
                        improved = True
    return b


def _canonical_sign(v: list[int]) -> list[int]:
    first = next((x for x in v if x), 0)
    return [-x for x in v] if first < 0 else v


@dataclass(frozen=True)
class ReducedBasis:
    """A reduced basis plus the measured constants of its certificate.

    ``c1 = prod ||b_j|| / det L``; ``c2 = max |k_j| ||b_j|| / ||x||`` over
    sampled lattice points ``x = sum k_j b_j``.
    """

    basis: LatticeBasis
    c1: float
    c2: float
    samples: int

    def payload(self) -> dict:
        return {
            "rows": [list(r) for r in self.basis.rows],
            "gram_det": self.basis.gram_det,
            "c1": self.c1,
            "c2": self.c2,
            "samples": self.samples,
        }


def coefficient_constant(basis: LatticeBasis, points: Sequence[Sequence[int]]) -> float:
    worst = 0.0
    norms = basis.norms()
    for x in points:
        nx = math.sqrt(sum(v * v for v in x))
        if nx == 0:
            continue
        k = basis.coordinates(x)
        if k is None:
            raise InvariantViolation("sample point outside the lattice")
        worst = max(worst, max(abs(kj) * bj / nx for kj, bj in zip(k, norms)))
    return worst


def reduced_basis(L: LatticeBasis, samples: int = 100, seed: int = 0, spread: int = 20) -> ReducedBasis:
    """LLL followed by greedy pairwise shortening, sorted by length."""
    if L.rank == 0:
        raise DomainError("cannot reduce a rank-0 lattice")
    b = _pairwise_improve(_lll([list(r) for r in L.rows]))
    b = sorted((_canonical_sign(v) for v in b), key=lambda v: (_dot(v, v), [-x for x in v]))
    red = LatticeBasis(tuple(map(tuple, b)), L.dim)
    if red.gram_det != L.gram_det:
        raise InvariantViolation("reduction changed the lattice determinant")
    c1 = math.prod(red.norms()) / red.det
    rng = random.Random(seed)
    pts = []
    for _ in range(samples):
        k = [rng.randint(-spread, spread) for _ in L.rows]
        pts.append([sum(kj * r[i] for kj, r in zip(k, L.rows)) for i in range(L.dim)])
    return ReducedBasis(red, c1, coefficient_constant(red, pts), samples)


# -- ratio extraction --------------------------------------------------------


@dataclass(frozen=True)
class RatioExtraction:
    """``alpha_i / alpha_pivot = ratios[i]`` for every ``i != pivot`` (0-based)."""

    pivot: int
    ratios: dict
    det: int
    box: int
    hadamard_const: float

    def bound_ok(self) -> bool:
        d = len(self.ratios) + 1
        # |a|, |b| <= (d-1)^((d-1)/2) H^(d-1), compared in squares
        lim_sq = (d - 1) ** (d - 1) * self.box ** (2 * (d - 1))
        return all(r.numerator**2 <= lim_sq and r.denominator**2 <= lim_sq for r in self.ratios.values())


def ratio_extraction(points: Sequence[Sequence[int]], alpha: Sequence | None = None, box: int | None = None) -> RatioExtraction:
    """Recover the ratios ``alpha_i / alpha_j`` from ``d - 1`` kernel points.

    With ``X`` the ``(d-1) x d`` matrix of points and ``X_j`` its minor
    without column ``j``, ``det(X_j) alpha_i = -alpha_j (adj(X_j) x_j)_i``.
    The pivot is the first ``j`` with ``det(X_j) != 0`` scanning from the
    last coordinate down.
    """
    pts = [list(map(int, p)) for p in points]
    if not pts and alpha is None:
        raise DomainError("zero points need an explicit dimension via alpha")
    d = len(alpha) if alpha is not None else len(pts[0]) if pts else 1
    if len(pts) != d - 1 or any(len(p) != d for p in pts):
        raise DomainError(f"need exactly {d - 1} points of length {d}")
    if alpha is not None:
        alpha = [Fraction(a) for a in alpha]
        for p in pts:
            if sum(a * x for a, x in zip(alpha, p)) != 0:
                raise DomainError("point is not in the kernel lattice")
    H = box if box is not None else max((abs(x) for p in pts for x in p), default=0)
    if any(abs(x) > H for p in pts for x in p):
        raise DomainError("point outside the box")
    for j in range(d - 1, -1, -1):
        xj = [[p[i] for i in range(d) if i != j] for p in pts]
        det = det_fraction_free(xj) if xj else 1
        if det == 0:
            continue
        adj = adjugate(xj) if xj else []
        col = [p[j] for p in pts]
        others = [i for i in range(d) if i != j]
        ratios = {}
        for row_idx, i in enumerate(others):
            num = -sum(a * c for a, c in zip(adj[row_idx], col))
            ratios[i] = Fraction(num, det)
        if alpha is not None:
            if alpha[j] == 0:
                raise InvariantViolation("pivot coordinate of alpha vanishes")
            for i, r in ratios.items():
                if alpha[i] * r.denominator != r.numerator * alpha[j]:
                    raise InvariantViolation(f"ratio for coordinate {i} disagrees with alpha")
        out = RatioExtraction(j, ratios, det, H, (d - 1) ** ((d - 1) / 2))
        if not out.bound_ok():
            raise InvariantViolation("extracted ratio exceeds the Hadamard bound")
        return out
    raise InvariantViolation("no nonsingular minor: points are dependent")
