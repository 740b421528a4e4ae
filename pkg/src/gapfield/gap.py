"""Generalized arithmetic progressions over Z (or Q) and over F_p.

A GAP is ``{base + sum(gens[i] * h[i]) : lo[i] <= h[i] <= hi[i]}``. Boxes are
arbitrary inclusive integer ranges, so both ``1..H`` and ``-H..H`` conventions
are first-class.

Text grammar: ``ring:base|c1,...,cd|lo1..hi1,...,lod..hid`` with ring ``Z``,
``Q`` or ``F<prime>``, e.g. ``F101:0|1|1..4``. Rank-0 GAPs use empty lists:
``F101:7||``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Iterable, Sequence

from .errors import DomainError, ResourceError, UsageError
from .exact.arith import inv_mod, require_prime

DEFAULT_ENUM_CAP = 10**7

Scalar = int | Fraction


@dataclass(frozen=True)
class Gap:
    """A rank-``d`` progression. ``p is None`` means characteristic zero."""

    base: Scalar
    gens: tuple[Scalar, ...]
    ranges: tuple[tuple[int, int], ...]
    p: int | None = None

    def __post_init__(self):
        gens = tuple(self.gens)
        ranges = tuple((int(lo), int(hi)) for lo, hi in self.ranges)
        if len(gens) != len(ranges):
            raise UsageError("one range per generator is required")
        if any(lo > hi for lo, hi in ranges):
            raise UsageError("empty range: lo > hi")
        if self.p is None:
            base = _norm_q(self.base)
            gens = tuple(_norm_q(g) for g in gens)
        else:
            require_prime(self.p)
            base = _to_residue(self.base, self.p)
            gens = tuple(_to_residue(g, self.p) for g in gens)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "ranges", ranges)

    @property
    def rank(self) -> int:
        return len(self.gens)

    @property
    def box_size(self) -> int:
        return prod(hi - lo + 1 for lo, hi in self.ranges)

    @property
    def height(self) -> int:
        """Largest absolute range endpoint (the H of a ``|h_i| <= H`` box)."""
        return max((max(abs(lo), abs(hi)) for lo, hi in self.ranges), default=0)

    def value(self, h: Sequence[int]) -> Scalar:
        v = self.base + sum(g * x for g, x in zip(self.gens, h))
        return v % self.p if self.p is not None else v

    def params(self) -> Iterable[tuple[int, ...]]:
        """Parameter vectors in lexicographic order."""
        return itertools.product(*(range(lo, hi + 1) for lo, hi in self.ranges))

    def enumerate(self, cap: int = DEFAULT_ENUM_CAP) -> ElementSet:
        return enumerate_gap(self, cap)

    def scaled(self, c: Scalar) -> Gap:
        return Gap(self.base * c, tuple(g * c for g in self.gens), self.ranges, self.p)

    def shifted(self, t: Scalar) -> Gap:
        return Gap(self.base + t, self.gens, self.ranges, self.p)

    def drop_zero_generators(self) -> Gap:
        keep = [i for i, g in enumerate(self.gens) if g != 0]
        return Gap(self.base, tuple(self.gens[i] for i in keep), tuple(self.ranges[i] for i in keep), self.p)

    def __str__(self):
        return format_gap(self)


def _norm_q(x) -> Scalar:
    x = Fraction(x)
    return int(x) if x.denominator == 1 else x


def _to_residue(x, p: int) -> int:
    if isinstance(x, Fraction):
        return x.numerator * inv_mod(x.denominator, p) % p
    return int(x) % p


@dataclass(frozen=True)
class ElementSet:
    """Distinct elements in first-occurrence order, with optional preimages.

    ``preimages[i]`` is the lexicographically smallest parameter vector
    producing ``elements[i]``; ``multiplicity[i]`` counts all of them.
    Derived sets (sumsets etc.) carry no preimages.
    """

    elements: tuple
    p: int | None = None
    preimages: tuple[tuple[int, ...], ...] | None = None
    multiplicity: tuple[int, ...] | None = None
    box_size: int | None = None

    def __post_init__(self):
        if len(set(self.elements)) != len(self.elements):
            raise UsageError("ElementSet elements must be distinct")

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self.index

    @property
    def index(self) -> dict:
        idx = self.__dict__.get("_index")
        if idx is None:
            idx = {x: i for i, x in enumerate(self.elements)}
            object.__setattr__(self, "_index", idx)
        return idx

    @property
    def proper(self) -> bool | None:
        return None if self.box_size is None else self.box_size == len(self.elements)

    @classmethod
    def from_iterable(cls, xs: Iterable, p: int | None = None) -> ElementSet:
        seen: dict = {}
        for x in xs:
            x = _to_residue(x, p) if p is not None else _norm_q(x)
            seen.setdefault(x, None)
        return cls(tuple(seen), p)

    def without_zero(self) -> tuple[ElementSet, int]:
        if 0 not in self:
            return self, 0
        return ElementSet(tuple(x for x in self.elements if x != 0), self.p), 1


def enumerate_gap(g: Gap, cap: int = DEFAULT_ENUM_CAP) -> ElementSet:
    if g.box_size > cap:
        raise ResourceError(f"box of {g.box_size} parameters exceeds the cap {cap}")
    first: dict = {}
    counts: dict = {}
    p = g.p
    base, gens = g.base, g.gens
    for h in g.params():
        v = base + sum(c * x for c, x in zip(gens, h))
        if p is not None:
            v %= p
        if v in first:
            counts[v] += 1
        else:
            first[v] = h
            counts[v] = 1
    elems = tuple(first)
    return ElementSet(
        elems,
        p,
        preimages=tuple(first[v] for v in elems),
        multiplicity=tuple(counts[v] for v in elems),
        box_size=g.box_size,
    )


def _same_ring(a: ElementSet, b: ElementSet) -> int | None:
    if a.p != b.p:
        raise UsageError(f"ring mismatch: {a.p} vs {b.p}")
    return a.p


def sumset(a: ElementSet, b: ElementSet) -> ElementSet:
    p = _same_ring(a, b)
    if p is None:
        return ElementSet.from_iterable((x + y for x in a for y in b))
    return ElementSet.from_iterable(((x + y) % p for x in a for y in b), p)


def productset(a: ElementSet, b: ElementSet) -> ElementSet:
    p = _same_ring(a, b)
    if p is None:
        return ElementSet.from_iterable((x * y for x in a for y in b))
    return ElementSet.from_iterable(((x * y) % p for x in a for y in b), p)


def inverse_set(a: ElementSet) -> tuple[ElementSet, int]:
    """``{1/x : x in a, x != 0}`` and the number of zeros skipped (0 or 1)."""
    nz, skipped = a.without_zero()
    if a.p is None:
        return ElementSet.from_iterable((1 / Fraction(x) for x in nz)), skipped
    return ElementSet.from_iterable((inv_mod(x, a.p) for x in nz), a.p), skipped


def square_set(a: ElementSet) -> ElementSet:
    if a.p is None:
        return ElementSet.from_iterable(x * x for x in a)
    return ElementSet.from_iterable((x * x % a.p for x in a), a.p)


def doubling_constant(a: ElementSet) -> Fraction:
    """``|A+A| / |A|`` exactly."""
    if len(a) == 0:
        raise DomainError("doubling constant of the empty set")
    return Fraction(len(sumset(a, a)), len(a))


# -- text grammar ----------------------------------------------------------

_RING = re.compile(r"^(Z|Q|F(\d+))$")
_RANGE = re.compile(r"^\s*([+-]?\d+)\s*\.\.\s*([+-]?\d+)\s*$")


def _parse_scalar(tok: str, allow_fraction: bool) -> Scalar:
    tok = tok.strip()
    try:
        if "/" in tok:
            if not allow_fraction:
                raise ValueError
            return _norm_q(Fraction(tok))
        return int(tok)
    except ValueError:
        raise UsageError(f"bad number {tok!r} in GAP") from None


def parse_gap(text: str) -> Gap:
    """Parse the GAP grammar, e.g. ``parse_gap("F101:0|1|1..4")``."""
    try:
        ring, rest = text.strip().split(":", 1)
        base_s, gens_s, ranges_s = rest.split("|")
    except ValueError:
        raise UsageError(f"GAP {text!r} does not match ring:base|gens|ranges") from None
    m = _RING.match(ring.strip())
    if not m:
        raise UsageError(f"unknown ring {ring!r}; expected Z, Q or F<prime>")
    p = int(m.group(2)) if m.group(2) else None
    frac = ring.strip() == "Q"
    base = _parse_scalar(base_s, frac)
    gens = tuple(_parse_scalar(t, frac) for t in gens_s.split(",")) if gens_s.strip() else ()
    ranges = []
    if ranges_s.strip():
        for t in ranges_s.split(","):
            rm = _RANGE.match(t)
            if not rm:
                raise UsageError(f"bad range {t!r}; expected lo..hi")
            ranges.append((int(rm.group(1)), int(rm.group(2))))
    return Gap(base, gens, tuple(ranges), p)


def format_gap(g: Gap) -> str:
    if g.p is not None:
        ring = f"F{g.p}"
    elif isinstance(g.base, Fraction) or any(isinstance(c, Fraction) for c in g.gens):
        ring = "Q"
    else:
        ring = "Z"
    gens = ",".join(str(c) for c in g.gens)
    ranges = ",".join(f"{lo}..{hi}" for lo, hi in g.ranges)
    return f"{ring}:{g.base}|{gens}|{ranges}"
