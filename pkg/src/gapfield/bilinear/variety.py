"""Counting points of the variety cut out by a coefficient system.

With ``x1 = y1 = 1`` the free variables are ``x0, x2..xd, y0, y2..ye``.
For ``d = e = 1`` each polynomial is the affine line
``x0 (j0 - j) + y0 (h0 - h) + (h0 j0 - h j) = 0`` and the count follows
from two ranks. Larger shapes with at most four free variables go through
Gröbner bases and the radical; anything bigger is refused.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from itertools import product as iproduct

from ..errors import InvariantViolation, UnsupportedError
from ..exact.arith import prime_factors, primes_up_to
from ..exact.matrix import minors_gcd, rank, solve_rational
from ..exact.poly import UniPoly
from . import groebner as gb
from .bounds import DIGITS, doss_log_bound
from .system import CoeffSystem, monomials

MAX_GROEBNER_VARS = 4


@dataclass(frozen=True)
class VarietyCount:
    """``value is None`` means infinitely many points."""

    value: int | None
    p: int | None = None

    @property
    def finite(self) -> bool:
        return self.value is not None

    def __str__(self):
        return "infinite" if self.value is None else str(self.value)


def _linear_parts(sys: CoeffSystem) -> tuple[list[list[int]], list[list[int]]]:
    # monomial order (0,1), (1,0), (1,1): coefficients of x0, y0 and the constant
    a = [[r[0], r[1]] for r in sys.rows]
    aug = [[r[0], r[1], r[2]] for r in sys.rows]
    return a, aug


def _linear_count(ra: int, raug: int) -> int | None:
    if raug > ra:
        return 0
    return 1 if ra == 2 else None


def _check_shape(sys: CoeffSystem) -> None:
    if sys.d < 1 or sys.e < 1:
        raise UnsupportedError("variety counting needs d, e >= 1")
    if (sys.d, sys.e) != (1, 1) and sys.nvars > MAX_GROEBNER_VARS:
        raise UnsupportedError(f"{sys.nvars} free variables exceed the supported {MAX_GROEBNER_VARS}")


def _var_index(d: int):
    def xi(a):
        return None if a == 1 else (0 if a == 0 else a - 1)

    def yi(b):
        return None if b == 1 else d + (0 if b == 0 else b - 1)

    return xi, yi


def system_polys(sys: CoeffSystem) -> list[dict]:
    """The polynomials with ``x1 = y1 = 1`` substituted, as exponent dicts."""
    n = sys.nvars
    xi, yi = _var_index(sys.d)
    mons = monomials(sys.d, sys.e)
    polys = []
    for row in sys.rows:
        f: dict = {}
        for (a, b), c in zip(mons, row):
            if not c:
                continue
            exp = [0] * n
            for v in (xi(a), yi(b)):
                if v is not None:
                    exp[v] += 1
            key = tuple(exp)
            f[key] = f.get(key, 0) + c
        polys.append({m: c for m, c in f.items() if c})
    return polys


def count_variety_points(sys: CoeffSystem, p: int | None = None) -> VarietyCount:
    """Distinct points over the closure of Q (``p is None``) or of F_p."""
    _check_shape(sys)
    if not sys.rows:
        return VarietyCount(None, p)
    if (sys.d, sys.e) == (1, 1):
        a, aug = _linear_parts(sys)
        return VarietyCount(_linear_count(rank(a, p), rank(aug, p)), p)
    return VarietyCount(gb.count_distinct_points(system_polys(sys), sys.nvars, p), p)


def exceptional_certificate(sys: CoeffSystem) -> int:
    """For ``d = e = 1``: product of the two minor gcds; every exceptional prime divides it."""
    if (sys.d, sys.e) != (1, 1):
        raise UnsupportedError("closed-form certificate only for d = e = 1")
    a, aug = _linear_parts(sys)
    ra, raug = rank(a), rank(aug)
    ga = minors_gcd(a, ra) if ra else 1
    gaug = minors_gcd(aug, raug) if raug else 1
    return ga * gaug


def exceptional_primes(sys: CoeffSystem, limit: int | None = None) -> list[int]:
    """Primes where the point count over the closure of F_p differs from that over Q.

    ``d = e = 1`` is exact without a sweep (``limit`` only filters); other
    shapes recount every prime up to ``limit``.
    """
    _check_shape(sys)
    base = count_variety_points(sys)
    if (sys.d, sys.e) == (1, 1):
        cert = exceptional_certificate(sys)
        cands = prime_factors(cert) if cert > 1 else []
        if limit is not None:
            cands = [q for q in cands if q <= limit]
        out = [q for q in cands if count_variety_points(sys, q) != VarietyCount(base.value, q)]
        return sorted(out)
    if limit is None:
        raise UnsupportedError("a prime limit is required beyond d = e = 1")
    return [q for q in primes_up_to(limit) if count_variety_points(sys, q).value != base.value]


def sweep_exceptional(sys: CoeffSystem, limit: int) -> list[int]:
    """Exhaustive per-prime recount, the oracle for :func:`exceptional_primes`."""
    base = count_variety_points(sys).value
    return [q for q in primes_up_to(limit) if count_variety_points(sys, q).value != base]


def doss_params(sys: CoeffSystem) -> tuple[int, int, int, Decimal]:
    """``(n, r, s, h)`` for the system: variables, degree 2, row count, log of the largest coefficient."""
    with localcontext() as ctx:
        ctx.prec = DIGITS
        h = Decimal(max(sys.height(), 1)).ln()
    return sys.nvars, 2, max(len(sys.rows), 1), h


def log_prime_product(primes) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = DIGITS
        return +sum((Decimal(q).ln() for q in primes), Decimal(0))


@dataclass(frozen=True)
class ExceptionalReport:
    system: CoeffSystem
    rational_count: VarietyCount
    primes: tuple[int, ...]
    limit: int | None
    sweep: tuple[int, ...] | None
    log_product: Decimal
    doss_bound: Decimal

    @property
    def within_bound(self) -> bool:
        return self.log_product <= self.doss_bound

    @property
    def sweep_agrees(self) -> bool | None:
        return None if self.sweep is None else self.sweep == self.primes

    def payload(self) -> dict:
        n, r, s, h = doss_params(self.system)
        return {
            "system": self.system.payload(),
            "count": str(self.rational_count),
            "exceptional_primes": list(self.primes),
            "limit": self.limit,
            "sweep": None if self.sweep is None else list(self.sweep),
            "sweep_agrees": self.sweep_agrees,
            "log_product": str(self.log_product),
            "doss": {"n": n, "r": r, "s": s, "h": str(h), "bound": str(self.doss_bound)},
            "within_bound": self.within_bound,
        }


def exceptional_report(sys: CoeffSystem, limit: int | None = None, sweep: bool = False) -> ExceptionalReport:
    """Exceptional primes with the determinant-bound comparison and an optional sweep cross-check."""
    primes = tuple(exceptional_primes(sys, limit))
    swept = None
    if sweep:
        if limit is None:
            raise UnsupportedError("a sweep needs a prime limit")
        swept = tuple(sweep_exceptional(sys, limit))
    n, r, s, h = doss_params(sys)
    return ExceptionalReport(
        system=sys,
        rational_count=count_variety_points(sys),
        primes=primes,
        limit=limit,
        sweep=swept,
        log_product=log_prime_product(primes),
        doss_bound=doss_log_bound(n, r, s, h),
    )


# -- rational witnesses --------------------------------------------------------


@dataclass(frozen=True)
class WitnessPoint:
    rho: tuple[Fraction, ...]
    tau: tuple[Fraction, ...]

    def __post_init__(self):
        if self.rho[1:2] != (1,) or self.tau[1:2] != (1,):
            raise InvariantViolation("witness must have rho_1 = tau_1 = 1")

    def annihilates(self, sys: CoeffSystem) -> bool:
        mons = monomials(sys.d, sys.e)
        return all(sum(c * self.rho[a] * self.tau[b] for (a, b), c in zip(mons, row)) == 0 for row in sys.rows)

    def payload(self) -> dict:
        return {"rho": [str(x) for x in self.rho], "tau": [str(x) for x in self.tau]}


def _assemble(sys: CoeffSystem, xs: list, ys: list) -> WitnessPoint:
    rho = (Fraction(xs[0]), Fraction(1), *map(Fraction, xs[1:]))
    tau = (Fraction(ys[0]), Fraction(1), *map(Fraction, ys[1:]))
    return WitnessPoint(rho[: sys.d + 1], tau[: sys.e + 1])


def _solve_x_given_y(sys: CoeffSystem, ys: list) -> list | None:
    """Fix ``y`` and solve the (now linear) system for the free x-variables."""
    tau = [ys[0], 1, *ys[1:]][: sys.e + 1]
    mons = monomials(sys.d, sys.e)
    xfree = [0] + list(range(2, sys.d + 1))
    a, rhs = [], []
    for row in sys.rows:
        coef = {x: Fraction(0) for x in range(sys.d + 1)}
        for (ai, bi), c in zip(mons, row):
            coef[ai] += c * Fraction(tau[bi])
        a.append([coef[x] for x in xfree])
        rhs.append(-coef[1])
    return solve_rational(a, rhs)


def _integral_line_point(a: list[list[int]], aug: list[list[int]]) -> list[Fraction] | None:
    """On a rank-1 system prefer an integer point, scanning x0 = 0, -1, 1, -2, ..."""
    if rank(a) != 1 or rank(aug) != 1:
        return None
    c01, c10, c11 = next(r for r in aug if any(r[:2]))
    if c10 == 0:
        x0 = Fraction(-c11, c01)
        return [x0, Fraction(0)] if x0.denominator == 1 else None
    for step in range(2 * abs(c10) + 1):
        x0 = (step + 1) // 2 * (1 if step % 2 == 0 else -1)
        y0 = Fraction(-c11 - c01 * x0, c10)
        if y0.denominator == 1:
            return [Fraction(x0), y0]
    return None


def rational_witness(sys: CoeffSystem, search_radius: int = 3, hints=()) -> WitnessPoint | None:
    """A rational point with ``rho_1 = tau_1 = 1`` annihilating every row, or None.

    ``hints`` are candidate ``(rho, tau)`` pairs tried first and kept only
    if they annihilate the system. Finite varieties are searched
    completely: each y-coordinate of a rational point is a rational root
    of that variable's minimal polynomial, and x follows by a linear solve.
    Infinite varieties are probed with small integer y-assignments.
    """
    _check_shape(sys)
    for rho, tau in hints:
        if len(rho) == sys.d + 1 and len(tau) == sys.e + 1 and rho[1] == 1 and tau[1] == 1:
            w = WitnessPoint(tuple(map(Fraction, rho)), tuple(map(Fraction, tau)))
            if w.annihilates(sys):
                return w
    if (sys.d, sys.e) == (1, 1):
        a, aug = _linear_parts(sys)
        sol = _integral_line_point(a, aug) if sys.rows else [Fraction(0), Fraction(0)]
        if sol is None:
            sol = solve_rational(a, [-r[2] for r in aug])
        if sol is None:
            return None
        w = _assemble(sys, [sol[0]], [sol[1]])
    else:
        w = None
        count = count_variety_points(sys)
        ny = sys.e
        if count.value == 0:
            return None
        if count.finite:
            F = gb.Field(None)
            G = gb.groebner(system_polys(sys), F)
            root_lists = []
            for v in range(sys.d, sys.d + ny):
                mp = gb.minimal_polynomial(G, v, sys.nvars, F)
                root_lists.append(UniPoly(mp.coeffs).rational_roots())
            candidates = iproduct(*root_lists)
        else:
            rng = range(-search_radius, search_radius + 1)
            candidates = sorted(iproduct(rng, repeat=ny), key=lambda t: (max(map(abs, t), default=0), t))
        for ys in candidates:
            xs = _solve_x_given_y(sys, list(ys))
            if xs is not None:
                w = _assemble(sys, xs, list(ys))
                break
        if w is None:
            return None
    if not w.annihilates(sys):
        raise InvariantViolation("witness does not annihilate the system")
    return w
