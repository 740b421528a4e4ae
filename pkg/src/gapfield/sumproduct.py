"""Sum-product statistics of finite sets mod p and the parameter-regime calculators."""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

import numpy as np

from .bilinear.bounds import delta, exception_exponent_doubling, power_decimal
from .counting import count_sets
from .errors import DomainError, InvariantViolation, ResourceError, UsageError
from .exact.arith import inv_mod, require_prime
from .gap import ElementSet, Gap, doubling_constant, enumerate_gap, sumset

DEFAULT_PAIR_CAP = 10**8


def _hist(values: np.ndarray) -> Counter:
    vals, counts = np.unique(values, return_counts=True)
    return Counter({int(v): int(c) for v, c in zip(vals.tolist(), counts.tolist())})


def product_histogram(A: ElementSet, p: int) -> Counter:
    """``r(λ)``: ordered pairs of ``A²`` with product ``λ`` mod p."""
    x = np.asarray(A.elements, dtype=np.int64)
    return _hist((x[:, None] * x[None, :]) % p)


def kloosterman_histogram(A: ElementSet, p: int) -> Counter:
    """Ordered pairs with ``1/a1 + 1/a2 = λ``; requires ``0 ∉ A``."""
    x = np.asarray([inv_mod(a, p) for a in A.elements], dtype=np.int64)
    return _hist((x[:, None] + x[None, :]) % p)


def _max_nonzero(h: Counter) -> tuple[int, int]:
    """(max count, smallest λ attaining it) over λ != 0; (0, 0) if none."""
    best = (0, 0)
    for lam, c in sorted(h.items()):
        if lam and c > best[0]:
            best = (c, lam)
    return best


@dataclass(frozen=True)
class SPReport:
    p: int
    size: int
    zero_excluded: int
    sumset_size: int
    doubling: Fraction
    product_size: int
    max_r: int
    argmax_r: int
    inverse_sum_size: int
    max_r_kloosterman: int
    zero_r_kloosterman: int
    square_sum_size: int
    histogram_classes: int
    measured_c: float | None

    def chain_holds(self) -> bool:
        """``|A|² ≤ |A| + |AA∖{0}| · max r``."""
        return self.size**2 <= self.size + self.product_size * self.max_r

    def kloosterman_chain_holds(self) -> bool:
        nonzero_classes = self.inverse_sum_size - (1 if self.zero_r_kloosterman else 0)
        return self.size**2 <= self.zero_r_kloosterman + nonzero_classes * self.max_r_kloosterman

    def payload(self) -> dict:
        return {
            "p": self.p,
            "size": self.size,
            "zero_excluded": self.zero_excluded,
            "sumset_size": self.sumset_size,
            "doubling": str(self.doubling),
            "product_size": self.product_size,
            "max_r": self.max_r,
            "argmax_r": self.argmax_r,
            "inverse_sum_size": self.inverse_sum_size,
            "max_r_kloosterman": self.max_r_kloosterman,
            "square_sum_size": self.square_sum_size,
            "histogram_classes": self.histogram_classes,
            "measured_c": self.measured_c,
            "chain_holds": self.chain_holds(),
            "kloosterman_chain_holds": self.kloosterman_chain_holds(),
        }


def analyze(A: ElementSet, p: int | None = None, pair_cap: int = DEFAULT_PAIR_CAP, cross_check: bool = True) -> SPReport:
    """Exact additive and multiplicative statistics of ``A ∖ {0}``.

    Raises :class:`InvariantViolation` if ``Σ r(λ) = |A|²`` or either
    inequality chain fails.
    """
    p = p if p is not None else A.p
    if p is None:
        raise UsageError("analyze works modulo a prime")
    require_prime(p)
    if p >= 3_000_000_000:
        raise ResourceError("histograms use int64 products; p must stay below 3e9")
    A = ElementSet.from_iterable(A.elements, p)
    A, zero = A.without_zero()
    n = len(A)
    if n == 0:
        raise DomainError("empty set after excluding 0")
    if n * n > pair_cap:
        raise ResourceError("|A|² exceeds the pair cap")
    rh = product_histogram(A, p)
    if sum(rh.values()) != n * n:
        raise InvariantViolation("Σ r(λ) != |A|²")
    max_r, arg = _max_nonzero(rh)
    kh = kloosterman_histogram(A, p)
    if sum(kh.values()) != n * n:
        raise InvariantViolation("Σ r(λ) != |A|² on the Kloosterman side")
    max_k, arg_k = _max_nonzero(kh)
    x = np.asarray(A.elements, dtype=np.int64)
    sq = (x * x) % p
    square_sum = np.unique((sq[:, None] + sq[None, :]) % p).size
    c = None
    if n >= 16 and max_r > 0:
        c = math.log(max_r) * math.log(math.log(n)) / math.log(n)
    rep = SPReport(
        p=p,
        size=n,
        zero_excluded=zero,
        sumset_size=len(sumset(A, A)),
        doubling=doubling_constant(A),
        product_size=sum(1 for lam in rh if lam),
        max_r=max_r,
        argmax_r=arg,
        inverse_sum_size=len(kh),
        max_r_kloosterman=max_k,
        zero_r_kloosterman=kh.get(0, 0),
        square_sum_size=int(square_sum),
        histogram_classes=len(rh),
        measured_c=c,
    )
    if not rep.chain_holds() or not rep.kloosterman_chain_holds():
        raise InvariantViolation("sum-product inequality chain failed")
    if cross_check:
        if max_r and count_sets(A, A, arg, "product") != max_r:
            raise InvariantViolation("histogram disagrees with the counting module")
        if max_k and count_sets(A, A, arg_k, "kloosterman") != max_k:
            raise InvariantViolation("Kloosterman histogram disagrees with the counting module")
    return rep


# -- regimes ---------------------------------------------------------------


def regime_check(size: int, K: int, p: int, c0=1) -> dict:
    """Both parameter regimes evaluated exactly; informational only."""
    if K < 2:
        raise DomainError("K must be at least 2")
    require_prime(p)
    dl = delta(K)
    pd = power_decimal(p, dl)
    small_threshold = Decimal(str(c0)) * pd
    big_threshold = Decimal(str(c0)) * Decimal(size) ** (2 * K)
    return {
        "size": size,
        "K": K,
        "p": p,
        "c0": str(c0),
        "delta": str(dl),
        "p_pow_delta": str(pd),
        "p_pow_delta_minus_1": f"{pd - 1:.6e}",
        "small_set_regime": Decimal(size) <= small_threshold,
        "A_pow_2K": str(size ** (2 * K)),
        "large_prime_regime": Decimal(p) > big_threshold,
        "exception_exponent": exception_exponent_doubling(K),
    }


# -- generators ---------------------------------------------------------------

KINDS = ("ap", "gap2", "union_aps", "random")


def generate_small_doubling(kind: str, size: int, p: int, seed: int = 0, pieces: int = 3) -> ElementSet:
    """Deterministic seeded test sets mod p.

    ``ap``: ``a + d·i``; ``gap2``: a proper rank-2 box image with near-square
    sides; ``union_aps``: ``pieces`` APs sharing a difference; ``random``:
    a uniform sample as a control.
    """
    require_prime(p)
    if size < 1 or size >= p:
        raise DomainError("size must lie in [1, p)")
    rng = random.Random(seed)
    if kind == "ap":
        a, d = rng.randrange(p), rng.randrange(1, p)
        return enumerate_gap(Gap(a, (d,), ((0, size - 1),), p))
    if kind == "gap2":
        s1 = math.isqrt(size)
        s2 = size // s1
        for _ in range(1000):
            g = Gap(rng.randrange(p), (rng.randrange(1, p), rng.randrange(1, p)), ((0, s1 - 1), (0, s2 - 1)), p)
            es = enumerate_gap(g)
            if es.proper:
                return es
        raise ResourceError("no proper rank-2 GAP found")
    if kind == "union_aps":
        d = rng.randrange(1, p)
        seen: dict[int, None] = {}
        per = max(1, size // pieces)
        while len(seen) < size:
            a = rng.randrange(p)
            for i in range(min(per, size - len(seen))):
                seen.setdefault((a + d * i) % p, None)
        return ElementSet(tuple(seen)[:size], p)
    if kind == "random":
        return ElementSet(tuple(rng.sample(range(p), size)), p)
    raise UsageError(f"unknown generator kind {kind!r}")
