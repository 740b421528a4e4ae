from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gapfield.counting import chang_count_rational, count_sets
from gapfield.errors import DomainError, UsageError
from gapfield.gap import ElementSet, Gap, doubling_constant, enumerate_gap
from gapfield.sumproduct import (
    KINDS,
    analyze,
    generate_small_doubling,
    kloosterman_histogram,
    product_histogram,
    regime_check,
)

P = 10007


def interval(n, p=P):
    return enumerate_gap(Gap(0, (1,), ((1, n),), p))


def test_interval_statistics():
    A = interval(16)
    r = analyze(A)
    assert sum(product_histogram(A, P).values()) == 256
    assert r.size == 16 and r.chain_holds() and r.kloosterman_chain_holds()
    assert r.max_r == 6  # 12, 24 and 48 each have six ordered factorisations inside 1..16
    assert r.sumset_size == 31 and r.doubling == Fraction(31, 16)
    assert r.product_size == len({a * b for a in range(1, 17) for b in range(1, 17)})


def test_geometric_progression():
    A = ElementSet.from_iterable([2**i for i in range(8)], P)
    r = analyze(A)
    assert r.product_size == 15 and r.max_r == 8
    assert r.doubling > 3


def test_zero_is_excluded_and_reported():
    A = ElementSet.from_iterable([0, 1, 2, 3], 11)
    r = analyze(A)
    assert r.zero_excluded == 1 and r.size == 3
    with pytest.raises(DomainError):
        analyze(ElementSet.from_iterable([0], 11))
    with pytest.raises(UsageError):
        analyze(ElementSet.from_iterable([1, 2]))


@given(st.sets(st.integers(1, 1008), min_size=1, max_size=60), st.sampled_from([1009, 10007]))
def test_identities(xs, p):
    A = ElementSet.from_iterable(sorted(xs), p)
    rep = analyze(A)
    assert sum(product_histogram(A, p).values()) == len(A) ** 2
    assert sum(kloosterman_histogram(A, p).values()) == len(A) ** 2
    assert rep.chain_holds() and rep.kloosterman_chain_holds()
    if rep.max_r:
        assert count_sets(A, A, rep.argmax_r, "product") == rep.max_r
    if rep.max_r_kloosterman:
        lam = max((v for v in kloosterman_histogram(A, p).items() if v[0]), key=lambda t: t[1])[0]
        assert count_sets(A, A, lam, "kloosterman") == rep.max_r_kloosterman


def test_max_r_against_integer_divisor_oracle():
    n = 64
    A = interval(n, 1000003)
    rep = analyze(A)
    Z = Gap(0, (1,), ((1, n),))
    d_max = max(chang_count_rational(Z, lam).count for lam in {a * b for a in range(1, n + 1) for b in range(1, n + 1)})
    # no wraparound: 64^2 < p, so the field count equals the integer count
    assert rep.max_r == d_max


def test_regime_examples():
    r = regime_check(100, 2, 10007)
    assert r["delta"] == "1/489626271744"
    assert Decimal(r["p_pow_delta"]) - 1 < Decimal("1e-10")
    assert not r["small_set_regime"]
    assert r["A_pow_2K"] == "100000000"
    assert r["exception_exponent"] == 80
    assert regime_check(1, 2, 10007)["small_set_regime"]
    with pytest.raises(DomainError):
        regime_check(10, 1, 10007)


def test_generators():
    A = generate_small_doubling("ap", 100, P, seed=3)
    assert len(A) == 100 and doubling_constant(A) == Fraction(199, 100)
    A = generate_small_doubling("gap2", 100, P, seed=3)
    assert len(A) == 100 and doubling_constant(A) == Fraction(19 * 19, 100)
    A = generate_small_doubling("union_aps", 90, P, seed=3)
    assert len(A) == 90 and doubling_constant(A) < 10
    A = generate_small_doubling("random", 100, P, seed=3)
    assert len(A) == 100 and doubling_constant(A) > 10
    assert generate_small_doubling("random", 50, P, seed=8) == generate_small_doubling("random", 50, P, seed=8)
    assert set(KINDS) == {"ap", "gap2", "union_aps", "random"}
    with pytest.raises(UsageError):
        generate_small_doubling("nope", 5, P)
