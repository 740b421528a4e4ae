"""The factored moduli Z0, Z1, Z2 and their product Z_{d,e}.

Z1 multiplies, over every anchor in the ``[-H, H]`` box and every linearly
independent set ``K`` of at most Δ other box points, the first-pivot
maximal minor of ``M(h0, j0, K)``. Each set of rows that any ``K`` can
select as its maximal independent subset is itself such a ``K``, so this
covers every prime that can occur. Z2 multiplies the exact exceptional
primes of each such system whose variety is finite over Q.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial
from itertools import combinations
from math import comb

from ..errors import UnsupportedError
from ..exact.arith import prime_factors, primes_up_to
from ..exact.factored import FactoredInteger
from ..exact.matrix import rank
from ..parallel import map_ordered
from .system import CoeffSystem, box_params, delta_dim, hadamard_factor_bound, z1_factor
from .variety import count_variety_points, exceptional_primes

DEFAULT_TRIPLE_CAP = 10**6
DEFAULT_CD = 4


def z0(d: int, H: int, C_d: int = DEFAULT_CD) -> FactoredInteger:
    """Product of all primes up to ``C_d * H**d``."""
    return FactoredInteger.from_primes(primes_up_to(C_d * H**d))


def triple_estimate(d: int, e: int, H: int) -> int:
    n = (2 * H + 1) ** (d + e)
    return n * sum(comb(n - 1, k) for k in range(1, delta_dim(d, e) + 1))


@dataclass(frozen=True)
class AnchorResult:
    z1: FactoredInteger
    z2: FactoredInteger
    triples: int
    finite_triples: int
    truncated: bool


def _anchor_products(anchor_idx: int, d: int, e: int, H: int, budget: int, with_z2: bool) -> AnchorResult:
    pts = [(p[:d], p[d:]) for p in box_params(d + e, H)]
    h0, j0 = pts[anchor_idx]
    others = [pt for i, pt in enumerate(pts) if i != anchor_idx]
    base = CoeffSystem(d, e, H, h0, j0, tuple(others))
    rows = base.rows
    D = delta_dim(d, e)
    z1_exp: dict[int, int] = {}
    z2_exp: dict[int, int] = {}
    seen = finite = 0
    truncated = False
    for k in range(1, D + 1):
        for idx in combinations(range(len(rows)), k):
            if seen >= budget:
                truncated = True
                break
            seen += 1
            sub = [list(rows[i]) for i in idx]
            if rank(sub) < k:
                continue
            sys = base.subsystem(idx)
            f1 = z1_factor(sys)
            for q in prime_factors(f1) if f1 > 1 else []:
                z1_exp[q] = z1_exp.get(q, 0) + 1
            if with_z2 and count_variety_points(sys).finite:
                finite += 1
                for q in exceptional_primes(sys):
                    z2_exp[q] = z2_exp.get(q, 0) + 1
        if truncated:
            break
    return AnchorResult(FactoredInteger(z1_exp), FactoredInteger(z2_exp), seen, finite, truncated)


@dataclass(frozen=True)
class ZReport:
    d: int
    e: int
    H: int
    C_d: int
    z0: FactoredInteger
    z1: FactoredInteger
    z2: FactoredInteger
    triples: int
    finite_triples: int

    @property
    def total(self) -> FactoredInteger:
        return FactoredInteger.product([self.z0, self.z1, self.z2])

    @property
    def small_prime_limit(self) -> int:
        return self.C_d * self.H**self.d

    def small_primes_divide(self) -> bool:
        return all(self.total.divisible_by(q) for q in primes_up_to(self.small_prime_limit))

    @property
    def hadamard_bound(self) -> int:
        return hadamard_factor_bound(self.d, self.e, self.H)

    def max_prime_ok(self) -> bool:
        return self.total.max_prime <= max(self.small_prime_limit, self.hadamard_bound)

    def payload(self) -> dict:
        out = self.total.report()
        out.update(
            {
                "d": self.d,
                "e": self.e,
                "H": self.H,
                "C_d": self.C_d,
                "z0": self.z0.report(),
                "z1": self.z1.report(),
                "z2": self.z2.report(),
                "triples": self.triples,
                "finite_triples": self.finite_triples,
                "small_prime_limit": self.small_prime_limit,
                "all_small_primes_divide": self.small_primes_divide(),
                "hadamard_bound": self.hadamard_bound,
                "max_prime_within_bound": self.max_prime_ok(),
            }
        )
        return out


def _run(d, e, H, cap, width, with_z2) -> tuple[FactoredInteger, FactoredInteger, int, int, bool]:
    n = (2 * H + 1) ** (d + e)
    per_anchor = max(1, cap // n)
    job = partial(_anchor_products, d=d, e=e, H=H, budget=per_anchor, with_z2=with_z2)
    parts = map_ordered(job, range(n), width)
    truncated = any(r.truncated for r in parts)
    z1 = FactoredInteger.product(r.z1 for r in parts).with_truncated(truncated)
    z2 = FactoredInteger.product(r.z2 for r in parts).with_truncated(truncated)
    return z1, z2, sum(r.triples for r in parts), sum(r.finite_triples for r in parts), truncated


def z1_product(d: int, e: int, H: int, cap: int = DEFAULT_TRIPLE_CAP, width: int = 1) -> FactoredInteger:
    """Z1 over all anchors; truncated (and flagged) once ``cap`` triples are spent."""
    return _run(d, e, H, cap, width, with_z2=False)[0]


def z_de(d: int, e: int, H: int, C_d: int = DEFAULT_CD, cap: int = DEFAULT_TRIPLE_CAP, width: int = 1) -> ZReport:
    """Full ``Z0 Z1 Z2`` assembly; exact exceptional sets need ``d = e = 1``."""
    if (d, e) != (1, 1):
        raise UnsupportedError("full Z assembly is implemented for d = e = 1")
    z1, z2, triples, finite, _ = _run(d, e, H, cap, width, with_z2=True)
    return ZReport(d, e, H, C_d, z0(d, H, C_d), z1, z2, triples, finite)
