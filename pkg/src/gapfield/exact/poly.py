"""Dense univariate polynomials over Q or a prime field F_p."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from ..errors import DomainError, UsageError
from .arith import require_prime


class UniPoly:
    """Polynomial with coefficients listed from the constant term upward.

    ``p is None`` means coefficients in Q (stored as Fractions); otherwise
    coefficients are ints reduced modulo the prime ``p``. Trailing zeros are
    stripped, so the zero polynomial has an empty coefficient tuple.
    """

    __slots__ = ("coeffs", "p")

    def __init__(self, coeffs: Iterable, p: int | None = None):
        if p is None:
            cs = [Fraction(c) for c in coeffs]
        else:
            require_prime(p)
            cs = [int(c) % p for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        self.p = p

    # -- helpers -----------------------------------------------------------
    def _make(self, coeffs) -> UniPoly:
        return UniPoly(coeffs, self.p)

    def _inv(self, c):
        return 1 / c if self.p is None else pow(c, -1, self.p)

    def _check(self, other: UniPoly) -> None:
        if self.p != other.p:
            raise UsageError("polynomials over different fields")

    @classmethod
    def from_roots(cls, roots: Sequence, p: int | None = None) -> UniPoly:
        f = cls([1], p)
        for r in roots:
            f = f * cls([-r, 1], p)
        return f

    # -- basic protocol ----------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self):
        return self.coeffs[-1]

    def __eq__(self, other):
        return isinstance(other, UniPoly) and self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.p))

    def __repr__(self):
        field = "Q" if self.p is None else f"F{self.p}"
        return f"UniPoly({[str(c) for c in self.coeffs]}, {field})"

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc if self.p is None else acc % self.p

    def __add__(self, other: UniPoly) -> UniPoly:
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return self._make(x + y for x, y in zip(a, b))

    def __neg__(self) -> UniPoly:
        return self._make(-c for c in self.coeffs)

    def __sub__(self, other: UniPoly) -> UniPoly:
        return self + (-other)

    def __mul__(self, other: UniPoly) -> UniPoly:
        self._check(other)
        if self.is_zero() or other.is_zero():
            return self._make([])
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return self._make(out)

    def scale(self, c) -> UniPoly:
        return self._make(c * x for x in self.coeffs)

    def divmod(self, other: UniPoly) -> tuple[UniPoly, UniPoly]:
        self._check(other)
        if other.is_zero():
            raise DomainError("division by the zero polynomial")
        rem = list(self.coeffs)
        dq = other.degree
        inv_lead = self._inv(other.lead())
        quot = [0] * max(len(rem) - dq, 0)
        for k in range(len(rem) - 1 - dq, -1, -1):
            c = rem[k + dq] * inv_lead
            if self.p is not None:
                c %= self.p
            quot[k] = c
            if c:
                for i, b in enumerate(other.coeffs):
                    rem[k + i] -= c * b
                    if self.p is not None:
                        rem[k + i] %= self.p
        return self._make(quot), self._make(rem[:dq])

    def __floordiv__(self, other: UniPoly) -> UniPoly:
        return self.divmod(other)[0]

    def __mod__(self, other: UniPoly) -> UniPoly:
        return self.divmod(other)[1]

    def monic(self) -> UniPoly:
        if self.is_zero():
            return self
        return self.scale(self._inv(self.lead()))

    def derivative(self) -> UniPoly:
        return self._make(i * c for i, c in enumerate(self.coeffs) if i)

    def gcd(self, other: UniPoly) -> UniPoly:
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    # -- root structure ----------------------------------------------------
    def _pth_root(self) -> UniPoly:
        # f(x) = g(x^p) = g(x)^p over F_p when f' == 0.
        p = self.p
        return self._make(self.coeffs[::p])

    def radical(self) -> UniPoly:
        """Product of the distinct monic irreducible factors (over the closure).

        Handles characteristic p: factors whose multiplicity is divisible by p
        vanish in the derivative and are recovered by taking p-th roots.
        """
        if self.is_zero():
            raise DomainError("radical of the zero polynomial")
        f = self.monic()
        if f.degree <= 0:
            return f
        df = f.derivative()
        if df.is_zero():
            return f._pth_root().radical()
        g = f.gcd(df)
        w = f // g
        if self.p is None:
            return w.monic()
        while True:
            y = g.gcd(w)
            if y.degree <= 0:
                break
            g = g // y
        if g.degree <= 0:
            return w.monic()
        return (w * g._pth_root().radical()).monic()

    def squarefree_degree(self) -> int:
        """Number of distinct roots in the algebraic closure of the coefficient field."""
        return self.radical().degree if self.degree > 0 else 0

    def rational_roots(self) -> list[Fraction]:
        """Distinct rational roots (``p is None`` only), ascending."""
        from math import lcm

        from .arith import divisors

        if self.p is not None:
            raise UsageError("rational_roots is defined over Q only")
        if self.is_zero():
            raise DomainError("roots of the zero polynomial")
        f = self.radical()
        roots: list[Fraction] = []
        if f.degree >= 1 and f.coeffs[0] == 0:
            roots.append(Fraction(0))
            f = f // UniPoly([0, 1])
        if f.degree < 1:
            return sorted(roots)
        den = lcm(*(c.denominator for c in f.coeffs))
        ints = [int(c * den) for c in f.coeffs]
        for num in divisors(ints[0]):
            for d in divisors(ints[-1]):
                for cand in (Fraction(num, d), Fraction(-num, d)):
                    if cand not in roots and f(cand) == 0:
                        roots.append(cand)
        return sorted(roots)


def squarefree_degree(f: UniPoly) -> int:
    """Distinct-root count of ``f``; raises :class:`DomainError` on the zero polynomial."""
    if f.is_zero():
        raise DomainError("squarefree_degree of the zero polynomial")
    return f.squarefree_degree()
