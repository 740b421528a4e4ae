"""Seeded generators shared by the test modules."""

import random

from gapfield.counting import ModInstance
from gapfield.exact import primes_up_to
from gapfield.gap import Gap

SMALL_PRIMES = [q for q in primes_up_to(10**4) if q > 7]


def random_gap(rng: random.Random, p: int, rank: int, max_box: int) -> Gap:
    side = max(1, int(round(max_box ** (1 / rank)))) if rank else 1
    gens = tuple(rng.randrange(1, p) for _ in range(rank))
    ranges = []
    for _ in range(rank):
        lo = rng.randint(-side, side)
        ranges.append((lo, lo + rng.randint(0, side - 1)))
    return Gap(rng.randrange(p), gens, tuple(ranges), p)


def random_instance(rng: random.Random, kind: str = "product", p: int | None = None, max_box: int = 1000) -> ModInstance:
    p = p or rng.choice(SMALL_PRIMES)
    A = random_gap(rng, p, rng.randint(0, 3), max_box)
    B = random_gap(rng, p, rng.randint(0, 3), max_box)
    return ModInstance(A, B, rng.randrange(1, p), kind)


def brute_count(inst: ModInstance) -> int:
    from gapfield.exact import inv_mod

    p, lam = inst.p, inst.lam
    xs, ys = set(inst.A.enumerate()), set(inst.B.enumerate())
    if inst.kind == "product":
        return sum(1 for x in xs for y in ys if x * y % p == lam)
    if inst.kind == "kloosterman":
        return sum(1 for x in xs for y in ys if x and y and (inv_mod(x, p) + inv_mod(y, p)) % p == lam)
    return sum(1 for x in xs for y in ys if (x * x + y * y) % p == lam)


COMPOSITE_TARGETS = [12, 24, 30, 36, 48, 60, 72, 84, 90, 120]


def planted_reduction_instance(rng: random.Random) -> ModInstance:
    """Small-integer GAPs in a large field with a highly composite target.

    No product wraps modulo p, so the integer lift of the coefficients is a
    rational witness and the solutions mirror integer factorisations.
    """
    p = rng.choice([10007, 100003, 1000003])
    d, e = rng.choice([(1, 1), (2, 1), (1, 2)])
    H = rng.randint(4, 8)

    def side(k):
        gens = (1,) + tuple(rng.choice([2, 3, 5, H + 1, 2 * H + 1]) for _ in range(k - 1))
        return Gap(0, gens, ((1, H),) * k, p)

    return ModInstance(side(d), side(e), rng.choice(COMPOSITE_TARGETS))
