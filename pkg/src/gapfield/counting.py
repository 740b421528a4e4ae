"""Exact solution counts for ``ab = λ``, ``1/a + 1/b = λ`` and ``a² + b² = λ`` over GAPs mod p.

Two independent counters exist for every kind: ``naive`` scans all of
``A × B`` (vectorised with numpy when products fit in int64) and ``lookup``
hashes ``A`` and solves for the partner of each ``b``. They must agree.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, lcm

import numpy as np

from .errors import DomainError, ResourceError, UnsupportedError, UsageError
from .exact.arith import divisors, inv_mod, require_prime, sqrt_minus_one
from .gap import DEFAULT_ENUM_CAP, ElementSet, Gap, enumerate_gap

KINDS = ("product", "kloosterman", "squares")
ALGOS = ("naive", "lookup")
DEFAULT_WITNESS_CAP = 10**4
_INT64_SAFE = 3_000_000_000


@dataclass(frozen=True)
class ModInstance:
    A: Gap
    B: Gap
    lam: int
    kind: str = "product"

    def __post_init__(self):
        if self.A.p is None or self.A.p != self.B.p:
            raise UsageError("both GAPs must live in the same prime field")
        if self.kind not in KINDS:
            raise UsageError(f"unknown equation kind {self.kind!r}")
        lam = int(self.lam) % self.A.p
        if lam == 0:
            raise DomainError("λ must be a nonzero residue")
        object.__setattr__(self, "lam", lam)

    @property
    def p(self) -> int:
        return self.A.p

    @property
    def ranks(self) -> tuple[int, int]:
        return self.A.rank, self.B.rank


@dataclass(frozen=True)
class CountReport:
    count: int
    witnesses: tuple = ()
    algo: str = "lookup"
    elapsed: float = 0.0
    param_count: int | None = None
    witness_cap: int = DEFAULT_WITNESS_CAP

    def __post_init__(self):
        if self.count < self.witness_cap and len(self.witnesses) != self.count:
            raise AssertionError("witness list must be complete below the cap")

    def payload(self, timing: bool = False) -> dict:
        out = {
            "count": self.count,
            "algo": self.algo,
            "witnesses": [list(map(str, w)) for w in self.witnesses],
        }
        if self.param_count is not None:
            out["param_count"] = self.param_count
        if timing:
            out["elapsed"] = self.elapsed
        return out


# -- per-kind partner solvers (lookup) ------------------------------------


def _solutions_lookup(a: ElementSet, b: ElementSet, lam: int, kind: str, p: int):
    """Yield (index_in_a, index_in_b) for every solution, in b-order."""
    index = a.index
    if kind == "product":
        for jb, y in enumerate(b.elements):
            if y:
                ia = index.get(lam * inv_mod(y, p) % p)
                if ia is not None:
                    yield ia, jb
    elif kind == "kloosterman":
        li = inv_mod(lam, p)
        li2 = li * li % p
        for jb, y in enumerate(b.elements):
            # 1/a = λ - 1/y  <=>  a = λ^{-2} (y - λ^{-1})^{-1} + λ^{-1}
            if y and (y - li) % p:
                x = (li2 * inv_mod(y - li, p) + li) % p
                ia = index.get(x)
                if ia is not None and x:
                    yield ia, jb
    else:
        by_square: dict[int, list[int]] = {}
        for ia, x in enumerate(a.elements):
            by_square.setdefault(x * x % p, []).append(ia)
        for jb, y in enumerate(b.elements):
            for ia in by_square.get((lam - y * y) % p, ()):
                yield ia, jb


def _solutions_naive(a: ElementSet, b: ElementSet, lam: int, kind: str, p: int):
    xs, ys = list(a.elements), list(b.elements)
    if kind == "kloosterman":
        keep_a = [i for i, x in enumerate(xs) if x]
        keep_b = [j for j, y in enumerate(ys) if y]
        xv = [inv_mod(xs[i], p) for i in keep_a]
        yv = [inv_mod(ys[j], p) for j in keep_b]
    else:
        keep_a, keep_b = list(range(len(xs))), list(range(len(ys)))
        xv, yv = xs, ys
        if kind == "squares":
            xv = [x * x % p for x in xs]
            yv = [y * y % p for y in ys]
    op = "mul" if kind == "product" else "add"
    if not xv or not yv:
        return []
    if p < _INT64_SAFE:
        xa = np.asarray(xv, dtype=np.int64)[:, None]
        ya = np.asarray(yv, dtype=np.int64)[None, :]
        table = (xa * ya) % p if op == "mul" else (xa + ya) % p
        ii, jj = np.nonzero(table == lam)
        return [(keep_a[i], keep_b[j]) for i, j in zip(ii.tolist(), jj.tolist())]
    out = []
    for i, x in enumerate(xv):
        for j, y in enumerate(yv):
            if ((x * y) if op == "mul" else (x + y)) % p == lam:
                out.append((keep_a[i], keep_b[j]))
    return out


def solution_pairs(
    inst: ModInstance, algo: str = "lookup", enum_cap: int = DEFAULT_ENUM_CAP
) -> tuple[ElementSet, ElementSet, list[tuple[int, int]]]:
    """Enumerated sets and the sorted index pairs of all solutions."""
    a = enumerate_gap(inst.A, enum_cap)
    b = enumerate_gap(inst.B, enum_cap)
    if algo == "naive":
        pairs = _solutions_naive(a, b, inst.lam, inst.kind, inst.p)
    elif algo == "lookup":
        pairs = list(_solutions_lookup(a, b, inst.lam, inst.kind, inst.p))
    else:
        raise UsageError(f"unknown algorithm {algo!r}")
    pairs.sort()
    return a, b, pairs


def count_sets(a: ElementSet, b: ElementSet, lam: int, kind: str = "product", algo: str = "lookup") -> int:
    """Solution count over explicit element sets mod p."""
    p = a.p
    if p is None or b.p != p:
        raise UsageError("both sets must live in the same prime field")
    if kind not in KINDS:
        raise UsageError(f"unknown equation kind {kind!r}")
    lam %= p
    if lam == 0:
        raise DomainError("λ must be a nonzero residue")
    if algo == "naive":
        return len(_solutions_naive(a, b, lam, kind, p))
    if algo == "lookup":
        return sum(1 for _ in _solutions_lookup(a, b, lam, kind, p))
    raise UsageError(f"unknown algorithm {algo!r}")


def value_histogram(a: ElementSet, b: ElementSet, kind: str = "product") -> Counter:
    """For each residue λ, the number of distinct pairs ``(a, b)`` whose equation value is λ.

    ``I_p(A, B, λ)`` is ``value_histogram(A, B, kind)[λ]`` for every λ != 0.
    """
    p = a.p
    if p is None or b.p != p:
        raise UsageError("both sets must live in the same prime field")
    if p >= _INT64_SAFE:
        raise ResourceError("histograms use int64 arithmetic; p must stay below 3e9")
    xs, ys = list(a.elements), list(b.elements)
    if kind == "kloosterman":
        xs = [inv_mod(x, p) for x in xs if x]
        ys = [inv_mod(y, p) for y in ys if y]
    elif kind == "squares":
        xs = [x * x % p for x in xs]
        ys = [y * y % p for y in ys]
    elif kind != "product":
        raise UsageError(f"unknown equation kind {kind!r}")
    if not xs or not ys:
        return Counter()
    xa = np.asarray(xs, dtype=np.int64)[:, None]
    ya = np.asarray(ys, dtype=np.int64)[None, :]
    table = (xa * ya) % p if kind == "product" else (xa + ya) % p
    vals, counts = np.unique(table, return_counts=True)
    return Counter({int(v): int(c) for v, c in zip(vals.tolist(), counts.tolist())})


def count_modp(
    inst: ModInstance,
    algo: str = "lookup",
    witness_cap: int = DEFAULT_WITNESS_CAP,
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> CountReport:
    """Exact number of pairs of distinct elements ``(a, b) ∈ A × B`` solving the equation.

    ``param_count`` additionally counts parameter pairs ``(h, j)`` with
    multiplicity, which differs from ``count`` for improper GAPs.
    """
    t0 = time.perf_counter()
    a, b, pairs = solution_pairs(inst, algo, enum_cap)
    witnesses = tuple((a.elements[i], b.elements[j]) for i, j in pairs[:witness_cap])
    param_count = sum(a.multiplicity[i] * b.multiplicity[j] for i, j in pairs)
    return CountReport(
        count=len(pairs),
        witnesses=witnesses,
        algo=algo,
        elapsed=time.perf_counter() - t0,
        param_count=param_count,
        witness_cap=witness_cap,
    )


# -- reductions to the product equation -----------------------------------


def reduce_kloosterman(inst: ModInstance) -> tuple[ModInstance, int]:
    """Shift both GAPs by ``-1/λ`` and target ``1/λ²``.

    Returns ``(product_instance, offset)`` with
    ``count(inst) == count(product_instance) - offset``. The offset is 1
    exactly when ``0`` lies in both sets: ``(0, 0)`` solves the shifted
    product equation but has no inverses in the original one.
    """
    if inst.kind != "kloosterman":
        raise UsageError("reduce_kloosterman needs a kloosterman instance")
    p = inst.p
    li = inv_mod(inst.lam, p)
    reduced = ModInstance(inst.A.shifted(-li), inst.B.shifted(-li), li * li % p, "product")
    a = enumerate_gap(inst.A)
    b = enumerate_gap(inst.B)
    offset = int(0 in a and 0 in b)
    return reduced, offset


@dataclass(frozen=True)
class SquaresReduction:
    """``(a, b) -> (a + ib, a - ib)`` turns ``a² + b² = λ`` into ``uv = λ``.

    ``upper`` is the product instance over ``U = A + iB`` and ``V = A - iB``
    (rank ``d + e`` each). The substitution is a bijection of F_p², so the
    solutions correspond exactly to product solutions inside the image of
    ``A × B``; counting over all of ``U × V`` can only add pairs.
    """

    original: ModInstance
    i: int
    upper: ModInstance

    def image_pairs(self) -> list[tuple[int, int]]:
        p, i = self.original.p, self.i
        a = enumerate_gap(self.original.A)
        b = enumerate_gap(self.original.B)
        return [((x + i * y) % p, (x - i * y) % p) for x in a for y in b]

    def count(self) -> int:
        """Product solutions ``uv = λ`` restricted to the image of ``A × B``."""
        lam, p = self.original.lam, self.original.p
        return sum(1 for u, v in self.image_pairs() if u * v % p == lam)

    def preimage(self, u: int, v: int) -> tuple[int, int]:
        p, i = self.original.p, self.i
        half = inv_mod(2, p)
        return (u + v) * half % p, (u - v) * half * inv_mod(i, p) % p


def reduce_squares(inst: ModInstance) -> SquaresReduction:
    if inst.kind != "squares":
        raise UsageError("reduce_squares needs a squares instance")
    p = inst.p
    if p % 4 != 1:
        raise UnsupportedError("the a² + b² reduction needs p ≡ 1 (mod 4)")
    i = sqrt_minus_one(p)
    A, B = inst.A, inst.B
    U = Gap(A.base + i * B.base, A.gens + tuple(i * g for g in B.gens), A.ranges + B.ranges, p)
    V = Gap(A.base - i * B.base, A.gens + tuple(-i * g for g in B.gens), A.ranges + B.ranges, p)
    return SquaresReduction(inst, i, ModInstance(U, V, inst.lam, "product"))


# -- characteristic-zero oracle ---------------------------------------------


def _integer_scaled(s: ElementSet) -> tuple[int, set[int]]:
    den = lcm(*(Fraction(x).denominator for x in s.elements)) if len(s) else 1
    return den, {int(Fraction(x) * den) for x in s.elements}


def chang_count_rational(
    A: Gap | ElementSet,
    lam,
    B: Gap | ElementSet | None = None,
    method: str = "divisor",
    witness_cap: int = DEFAULT_WITNESS_CAP,
) -> CountReport:
    """Ordered pairs ``(a1, a2) ∈ A × B`` (``B = A`` by default) with ``a1 a2 = λ`` over Q.

    ``divisor`` clears denominators, factors the integer target and tests
    each signed divisor pair for membership; ``brute`` scans all pairs;
    ``lookup`` hashes ``B`` and divides. Targets at or above 2**64 are
    rejected by the divisor method.
    """
    t0 = time.perf_counter()
    lam = Fraction(lam)
    if lam == 0:
        raise DomainError("λ must be nonzero")
    sa = A if isinstance(A, ElementSet) else enumerate_gap(A)
    if B is None:
        sb = sa
    else:
        sb = B if isinstance(B, ElementSet) else enumerate_gap(B)
    if sa.p is not None or sb.p is not None:
        raise UsageError("chang_count_rational works in characteristic zero")
    if method == "divisor":
        da, ia = _integer_scaled(sa)
        db, ib = _integer_scaled(sb)
        target = lam * da * db
        pairs = []
        if target.denominator == 1:
            n = int(target)
            if abs(n) >= 2**64:
                raise ResourceError("divisor enumeration is limited to targets below 2**64")
            for x in divisors(n):
                for sx in (x, -x):
                    if sx in ia and n // sx in ib:
                        pairs.append((Fraction(sx, da), Fraction(n // sx, db)))
    elif method == "brute":
        pairs = [(x, y) for x in sa for y in sb if x * y == lam]
    elif method == "lookup":
        members = set(Fraction(x) for x in sa)
        pairs = [(lam / Fraction(y), Fraction(y)) for y in sb if y and lam / Fraction(y) in members]
    else:
        raise UsageError(f"unknown method {method!r}")
    pairs = sorted((Fraction(x), Fraction(y)) for x, y in pairs)
    return CountReport(
        count=len(pairs),
        witnesses=tuple(pairs[:witness_cap]),
        algo=method,
        elapsed=time.perf_counter() - t0,
        witness_cap=witness_cap,
    )


# -- pigeonhole construction -------------------------------------------------


@dataclass(frozen=True)
class PigeonholeResult:
    lam0: int
    count: int
    param_count: int
    nonzero_pairs: int
    lower_bound: int
    proper: tuple[bool, bool]
    histogram: dict = field(default_factory=dict, compare=False)

    def payload(self) -> dict:
        return {
            "lambda0": self.lam0,
            "count": self.count,
            "param_count": self.param_count,
            "nonzero_pairs": self.nonzero_pairs,
            "lower_bound": self.lower_bound,
            "proper": list(self.proper),
        }


def base_progressions(H: int, d: int, e: int, p: int) -> tuple[Gap, Gap]:
    """The GAPs with generators ``(2H+1)**(i-1)`` over ``[-H, H]`` boxes."""
    A0 = Gap(0, tuple((2 * H + 1) ** i for i in range(d)), ((-H, H),) * d, p)
    B0 = Gap(0, tuple((2 * H + 1) ** i for i in range(e)), ((-H, H),) * e, p)
    return A0, B0


def product_histogram(A: Gap, B: Gap) -> Counter:
    """Counter of ``a*b mod p`` over all parameter pairs (with multiplicity)."""
    p = A.p
    xs = np.asarray([A.value(h) for h in A.params()], dtype=object if p >= _INT64_SAFE else np.int64)
    ys = np.asarray([B.value(j) for j in B.params()], dtype=object if p >= _INT64_SAFE else np.int64)
    prods = (xs[:, None] * ys[None, :]) % p
    vals, counts = np.unique(prods.ravel(), return_counts=True)
    return Counter({int(v): int(c) for v, c in zip(vals.tolist(), counts.tolist())})


def pigeonhole_witness(H: int, d: int, e: int, p: int, enum_cap: int = DEFAULT_ENUM_CAP) -> PigeonholeResult:
    """Most popular nonzero product class for the base-(2H+1) progressions.

    The returned class carries at least the average number of nonzero
    products, which is asserted.
    """
    require_prime(p)
    if p <= H**d:
        raise DomainError(f"need p > H^d = {H**d}")
    A0, B0 = base_progressions(H, d, e, p)
    if A0.box_size * B0.box_size > enum_cap:
        raise ResourceError("pigeonhole histogram exceeds the enumeration cap")
    hist = product_histogram(A0, B0)
    nonzero = sum(c for v, c in hist.items() if v)
    if nonzero == 0:
        raise DomainError("every product vanishes modulo p")
    lam0 = min((v for v in hist if v), key=lambda v: (-hist[v], v))
    bound = ceil(nonzero / (p - 1))
    if hist[lam0] < bound:
        raise AssertionError("pigeonhole bound violated")
    rep = count_modp(ModInstance(A0, B0, lam0, "product"))
    sa, sb = enumerate_gap(A0), enumerate_gap(B0)
    return PigeonholeResult(
        lam0=lam0,
        count=rep.count,
        param_count=hist[lam0],
        nonzero_pairs=nonzero,
        lower_bound=bound,
        proper=(bool(sa.proper), bool(sb.proper)),
        histogram=dict(hist),
    )
