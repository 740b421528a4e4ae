"""Integers kept as prime-exponent maps, for moduli too large to expand."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from typing import Iterable, Mapping

from ..errors import DomainError, ResourceError
from .arith import factorize, is_prime

EXPAND_LOG2_LIMIT = 10**6


@dataclass(frozen=True)
class FactoredInteger:
    """``prod(p**e)`` over ``factors``; ``truncated`` marks a partial product."""

    factors: Mapping[int, int] = field(default_factory=dict)
    truncated: bool = False

    def __post_init__(self):
        clean = {}
        for q, e in sorted(self.factors.items()):
            if e < 0:
                raise DomainError("negative exponent")
            if e == 0:
                continue
            if not is_prime(q):
                raise DomainError(f"factor {q} is not prime")
            clean[int(q)] = int(e)
        object.__setattr__(self, "factors", clean)

    @classmethod
    def from_int(cls, n: int) -> FactoredInteger:
        return cls(factorize(n))

    @classmethod
    def from_primes(cls, primes: Iterable[int]) -> FactoredInteger:
        out: dict[int, int] = {}
        for q in primes:
            out[q] = out.get(q, 0) + 1
        return cls(out)

    def __mul__(self, other: FactoredInteger) -> FactoredInteger:
        out = dict(self.factors)
        for q, e in other.factors.items():
            out[q] = out.get(q, 0) + e
        return FactoredInteger(out, self.truncated or other.truncated)

    @staticmethod
    def product(items: Iterable[FactoredInteger]) -> FactoredInteger:
        out: dict[int, int] = {}
        truncated = False
        for f in items:
            truncated |= f.truncated
            for q, e in f.factors.items():
                out[q] = out.get(q, 0) + e
        return FactoredInteger(out, truncated)

    def with_truncated(self, flag: bool = True) -> FactoredInteger:
        return FactoredInteger(self.factors, self.truncated or flag)

    def log2(self) -> float:
        return math.fsum(e * math.log2(q) for q, e in self.factors.items())

    def log10(self) -> float:
        return math.fsum(e * math.log10(q) for q, e in self.factors.items())

    def ln(self, digits: int = 40) -> Decimal:
        """Natural logarithm to ``digits`` significant digits."""
        with localcontext() as ctx:
            ctx.prec = digits + 5
            total = sum((e * Decimal(q).ln() for q, e in self.factors.items()), Decimal(0))
            ctx.prec = digits
            return +total

    @property
    def max_prime(self) -> int:
        return max(self.factors, default=1)

    def divisible_by(self, q: int) -> bool:
        return q in self.factors

    def to_int(self) -> int:
        if self.log2() >= EXPAND_LOG2_LIMIT:
            raise ResourceError("refusing to expand an integer above 2**1000000")
        return math.prod(q**e for q, e in self.factors.items())

    def report(self) -> dict:
        return {
            "factors": {str(q): e for q, e in self.factors.items()},
            "log10": self.log10(),
            "max_prime": self.max_prime,
            "truncated": self.truncated,
        }
