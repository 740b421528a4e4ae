"""Primes, factorization and arithmetic in prime fields."""

from __future__ import annotations

import math
from functools import lru_cache

from ..errors import DomainError, UsageError

# Deterministic Miller-Rabin: the first 13 primes are a proven witness set for
# every n < 3,317,044,064,679,887,385,961,981 (Sorenson and Webster).
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
MR_LIMIT = 3_317_044_064_679_887_385_961_981
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def _strong_probable_prime(n: int, a: int) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


@lru_cache(maxsize=1 << 16)
def is_prime(n: int) -> bool:
    """Deterministic primality test, proven correct for ``n < MR_LIMIT`` (covers 2**64).

    >>> is_prime(2), is_prime(3215031751)
    (True, False)
    """
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n % q == 0:
            return n == q
    if n >= MR_LIMIT:
        raise DomainError(f"primality of {n} is outside the deterministic range")
    return all(_strong_probable_prime(n, a) for a in _MR_BASES)


def primes_up_to(limit: int) -> list[int]:
    """All primes ``p <= limit`` in ascending order (sieve of Eratosthenes)."""
    if limit < 2:
        return []
    sieve = bytearray([1]) * (limit + 1)
    sieve[0] = sieve[1] = 0
    for q in range(2, math.isqrt(limit) + 1):
        if sieve[q]:
            sieve[q * q :: q] = bytes(len(range(q * q, limit + 1, q)))
    return [i for i, flag in enumerate(sieve) if flag]


def primes_between(lo: int, hi: int) -> list[int]:
    """Primes in the half-open interval ``(lo, hi]``."""
    return [q for q in primes_up_to(hi) if q > lo]


def _pollard_brent(n: int, c: int) -> int:
    # Brent's cycle detection with batched gcds; returns a factor or n on failure.
    y, r, q, g = 2, 1, 1, 1
    m = 64
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        r *= 2
    if g == n:
        g = 1
        while g == 1:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
    return g


def _split(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    c = 1
    while True:
        g = _pollard_brent(n, c)
        if 1 < g < n:
            break
        c += 1
    _split(g, out)
    _split(n // g, out)


@lru_cache(maxsize=1 << 16)
def _factor_cached(n: int) -> tuple[tuple[int, int], ...]:
    out: dict[int, int] = {}
    for q in primes_up_to(1000):
        if q * q > n:
            break
        while n % q == 0:
            out[q] = out.get(q, 0) + 1
            n //= q
    _split(n, out)
    return tuple(sorted(out.items()))


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of ``|n|`` as ``{prime: exponent}``.

    Trial division by primes below 1000, then Pollard-rho (Brent variant).
    Raises :class:`DomainError` for ``n == 0`` or ``|n| >= MR_LIMIT``.
    """
    n = abs(n)
    if n == 0:
        raise DomainError("cannot factor 0")
    if n >= MR_LIMIT:
        raise DomainError(f"{n} exceeds the supported factorization range")
    return dict(_factor_cached(n))


def prime_factors(n: int) -> list[int]:
    return [q for q, _ in _factor_cached(abs(n))] if n else []


def divisors(n: int) -> list[int]:
    """Positive divisors of ``|n|`` in ascending order."""
    divs = [1]
    for q, e in factorize(n).items():
        divs = [d * q**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def require_prime(p: int) -> int:
    if not isinstance(p, int) or not is_prime(p):
        raise UsageError(f"modulus {p!r} is not prime")
    return p


def inv_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise DomainError(f"0 has no inverse modulo {p}")
    return pow(a, -1, p)


def sqrt_minus_one(p: int) -> int:
    """Smallest ``i`` in ``[1, p)`` with ``i*i == -1 (mod p)``; needs ``p % 4 == 1``."""
    if p % 4 != 1:
        raise DomainError(f"-1 is not a square modulo {p}")
    for g in range(2, p):
        if pow(g, (p - 1) // 2, p) == p - 1:
            i = pow(g, (p - 1) // 4, p)
            return min(i, p - i)
    raise AssertionError("unreachable for prime p")


class ResidueElem:
    """An element of the prime field F_p. Immutable."""

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        require_prime(p)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "value", int(value) % p)

    def __setattr__(self, name, value):
        raise AttributeError("ResidueElem is immutable")

    def _coerce(self, other) -> int:
        if isinstance(other, ResidueElem):
            if other.p != self.p:
                raise UsageError(f"mixing F_{self.p} and F_{other.p}")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def _new(self, v: int) -> ResidueElem:
        out = object.__new__(ResidueElem)
        object.__setattr__(out, "p", self.p)
        object.__setattr__(out, "value", v % self.p)
        return out

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(o - self.value)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value * o)

    __rmul__ = __mul__

    def inverse(self) -> ResidueElem:
        return self._new(inv_mod(self.value, self.p))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._new(self.value * inv_mod(o, self.p))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._new(o * inv_mod(self.value, self.p))

    def __neg__(self):
        return self._new(-self.value)

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return self._new(pow(self.value, k, self.p))

    def __eq__(self, other):
        if isinstance(other, ResidueElem):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return (other - self.value) % self.p == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"ResidueElem({self.value}, {self.p})"
