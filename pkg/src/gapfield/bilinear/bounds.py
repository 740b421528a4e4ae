"""Closed-form bound evaluators.

Exact rationals where the formula is rational; otherwise ``Decimal`` values
with 40 significant digits. Non-explicit constants are parameters.
"""

from __future__ import annotations

from decimal import Decimal, localcontext
from fractions import Fraction

from ..errors import DomainError

DIGITS = 40


def _positive(**kw):
    for k, v in kw.items():
        if v <= 0:
            raise DomainError(f"{k} must be positive")


def _dec(x) -> Decimal:
    if isinstance(x, Fraction):
        return Decimal(x.numerator) / Decimal(x.denominator)
    return Decimal(str(x)) if isinstance(x, float) else Decimal(x)


def gamma(s: int) -> Fraction:
    """``1 / ((11s + 15) 2^(3s+5))``."""
    _positive(s=s)
    return Fraction(1, (11 * s + 15) * 2 ** (3 * s + 5))


def delta(K: int) -> Fraction:
    """``1 / ((44K + 26) 2^(12K+8))``, which equals ``gamma(4K + 1)``."""
    _positive(K=K)
    return Fraction(1, (44 * K + 26) * 2 ** (12 * K + 8))


def doss_log_bound(n: int, r: int, s: int, h) -> Decimal:
    """``(11n+4) r^(3n+1) h + (55r+99) log((2n+5)s) r^(3n+2)``.

    ``n`` variables, degree ``r``, ``s`` polynomials, logarithmic height ``h``.
    """
    _positive(n=n, r=r, s=s)
    if h < 0:
        raise DomainError("height must be nonnegative")
    with localcontext() as ctx:
        ctx.prec = DIGITS + 10
        t1 = (11 * n + 4) * Decimal(r) ** (3 * n + 1) * _dec(h)
        t2 = (55 * r + 99) * Decimal((2 * n + 5) * s).ln() * Decimal(r) ** (3 * n + 2)
        ctx.prec = DIGITS
        return +(t1 + t2)


def logz_bound(d: int, e: int, H: int) -> Decimal:
    """``H^((d+e)(d+1)(e+1)) log H`` with implied constant 1."""
    _positive(d=d, e=e, H=H)
    with localcontext() as ctx:
        ctx.prec = DIGITS + 10
        v = Decimal(H) ** ((d + e) * (d + 1) * (e + 1)) * Decimal(H).ln()
        ctx.prec = DIGITS
        return +v


def main_logz_exponent(d: int, e: int) -> Fraction:
    """``(d+e)(d+e+2)^2 / 4``, which dominates ``(d+e)(d+1)(e+1)``."""
    _positive(d=d, e=e)
    return Fraction((d + e) * (d + e + 2) ** 2, 4)


def smoothness_exponent(d: int, e: int) -> Fraction:
    """``1 / gamma(d+e+1)``: the modulus is ``O(H^this)``-smooth."""
    return 1 / gamma(d + e + 1)


def exception_exponent_gap(d: int, e: int) -> int:
    """Exponent of ``H`` in the count of exceptional primes: ``(d+e)^3 + (d+e)``."""
    _positive(d=d, e=e)
    return (d + e) ** 3 + (d + e)


def exception_exponent_doubling(K: int) -> int:
    """``8K^3 + 4K^2``."""
    _positive(K=K)
    return 8 * K**3 + 4 * K**2


def cs_rank(K: int) -> int:
    """Rank bound ``2K`` for a GAP covering a set of doubling ``K``."""
    _positive(K=K)
    return 2 * K


def cs_size_log(K, c=1) -> Decimal:
    """``c K^4 (log K + 2)``, the log of the size-ratio bound."""
    _positive(K=K)
    with localcontext() as ctx:
        ctx.prec = DIGITS + 10
        k = _dec(K)
        v = _dec(c) * k**4 * (k.ln() + 2)
        ctx.prec = DIGITS
        return +v


def power_decimal(base: int, exponent: Fraction) -> Decimal:
    """``base ** exponent`` to 40 digits."""
    with localcontext() as ctx:
        ctx.prec = DIGITS + 10
        v = (_dec(exponent) * Decimal(base).ln()).exp()
        ctx.prec = DIGITS
        return +v


def all_prime_regime(H: int, d: int, e: int, p: int, C0=1) -> dict:
    """Whether ``H <= C0 p^gamma(d+e+1)``."""
    g = gamma(d + e + 1)
    thr = _dec(C0) * power_decimal(p, g)
    return {"gamma": str(g), "threshold": str(thr), "holds": Decimal(H) <= thr}
