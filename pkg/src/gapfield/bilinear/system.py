"""Bilinear difference polynomials and their integer coefficient systems.

For parameter vectors ``h, h0`` (length d) and ``j, j0`` (length e) let
``g = (1, h)``, ``k = (1, j)``. The polynomial

    P(X, Y) = (sum g0_a X_a)(sum k0_b Y_b) - (sum g_a X_a)(sum k_b Y_b)

has coefficient ``g0[a] k0[b] - g[a] k[b]`` on ``X_a Y_b``. The ``X_0 Y_0``
coefficient is always zero and is dropped, leaving ``Δ = (d+1)(e+1) - 1``.
Monomials are ordered lexicographically by ``(a, b)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct
from math import isqrt
from typing import Sequence

from ..errors import DomainError, InvariantViolation, UsageError
from ..exact.matrix import det_fraction_free, first_nonsingular_submatrix, independent_rows, rank

Param = tuple[int, ...]


def monomials(d: int, e: int) -> list[tuple[int, int]]:
    return [(a, b) for a in range(d + 1) for b in range(e + 1) if (a, b) != (0, 0)]


def delta_dim(d: int, e: int) -> int:
    return (d + 1) * (e + 1) - 1


def coeff_vector(h: Sequence[int], h0: Sequence[int], j: Sequence[int], j0: Sequence[int]) -> tuple[int, ...]:
    """Integer coefficients of ``P_{h,h0,j,j0}`` on the monomials ``X_a Y_b``.

    >>> coeff_vector((2,), (1,), (3,), (1,))
    (-2, -1, -5)
    """
    if len(h) != len(h0) or len(j) != len(j0):
        raise UsageError("parameter vectors of inconsistent length")
    g, g0 = (1, *h), (1, *h0)
    k, k0 = (1, *j), (1, *j0)
    if g0[0] * k0[0] - g[0] * k[0] != 0:
        raise InvariantViolation("X0Y0 coefficient must vanish")
    return tuple(g0[a] * k0[b] - g[a] * k[b] for a, b in monomials(len(h), len(j)))


@dataclass(frozen=True)
class CoeffSystem:
    """Rows of ``M(h0, j0, K)`` in the canonical order of ``K``."""

    d: int
    e: int
    H: int
    h0: Param
    j0: Param
    K: tuple[tuple[Param, Param], ...]
    rows: tuple[tuple[int, ...], ...] = field(init=False)

    def __post_init__(self):
        K = tuple((tuple(map(int, h)), tuple(map(int, j))) for h, j in self.K)
        object.__setattr__(self, "h0", tuple(map(int, self.h0)))
        object.__setattr__(self, "j0", tuple(map(int, self.j0)))
        object.__setattr__(self, "K", K)
        if len(self.h0) != self.d or len(self.j0) != self.e:
            raise UsageError("anchor has the wrong dimensions")
        for h, j in K:
            if len(h) != self.d or len(j) != self.e:
                raise UsageError("solution parameter has the wrong dimensions")
        rows = tuple(coeff_vector(h, self.h0, j, self.j0) for h, j in K)
        object.__setattr__(self, "rows", rows)

    @property
    def delta(self) -> int:
        return delta_dim(self.d, self.e)

    @property
    def nvars(self) -> int:
        """Free variables once ``x1 = y1 = 1``: ``x0, x2..xd, y0, y2..ye``."""
        return self.d + self.e

    def matrix(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def rank(self, p: int | None = None) -> int:
        return rank(self.matrix(), p) if self.rows else 0

    def subsystem(self, idx: Sequence[int]) -> CoeffSystem:
        return CoeffSystem(self.d, self.e, self.H, self.h0, self.j0, tuple(self.K[i] for i in idx))

    def height(self) -> int:
        return max((abs(x) for r in self.rows for x in r), default=0)

    def payload(self) -> dict:
        return {
            "d": self.d,
            "e": self.e,
            "H": self.H,
            "anchor": {"h0": list(self.h0), "j0": list(self.j0)},
            "K": [{"h": list(h), "j": list(j)} for h, j in self.K],
        }


def max_independent_subset(sys: CoeffSystem, p: int | None = None) -> tuple[list[int], int]:
    """Indices of a greedy maximal independent row set over Q or F_p, and the rank."""
    if not sys.rows:
        raise DomainError("empty system")
    idx = independent_rows(sys.matrix(), p)
    return idx, len(idx)


def z1_factor(sys: CoeffSystem) -> int:
    """``|det|`` of the first-pivot maximal nonsingular square submatrix (1 if none)."""
    if not sys.rows:
        return 1
    rws, cls = first_nonsingular_submatrix(sys.matrix())
    if not rws:
        return 1
    sub = [[sys.rows[i][c] for c in cls] for i in rws]
    return abs(det_fraction_free(sub))


def entry_bound(H: int) -> int:
    """Largest possible absolute coefficient for parameters bounded by ``H``."""
    return 2 * H * H + 2 * H


def hadamard_factor_bound(d: int, e: int, H: int) -> int:
    """Ceiling of ``(sqrt(Δ) (2H²+2H))^Δ``, a bound for every Δ-minor."""
    D = delta_dim(d, e)
    sq = D * entry_bound(H) ** 2  # square of sqrt(Δ)·B
    if D % 2 == 0:
        return sq ** (D // 2)
    r = isqrt(sq ** D)
    return r if r * r == sq**D else r + 1


def box_params(dim: int, H: int) -> list[Param]:
    return list(iproduct(range(-H, H + 1), repeat=dim))
