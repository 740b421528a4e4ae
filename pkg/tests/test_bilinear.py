import random
import signal
from decimal import Decimal
from fractions import Fraction
from itertools import product

import mpmath
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from gapfield.bilinear import (
    CoeffSystem,
    coeff_vector,
    count_variety_points,
    exceptional_primes,
    max_independent_subset,
    monomials,
    rational_witness,
    sweep_exceptional,
    z0,
    z1_factor,
    z_de,
)
from gapfield.bilinear import bounds as bd
from gapfield.bilinear.system import box_params, delta_dim, entry_bound, hadamard_factor_bound
from gapfield.bilinear.variety import exceptional_certificate, exceptional_report, system_polys
from gapfield.errors import DomainError, InvariantViolation, UnsupportedError
from gapfield.exact import primes_up_to, rank
from gapfield.exact.matrix import minors_gcd


def line_system(*K, anchor=((1,), (1,))):
    return CoeffSystem(1, 1, 10, anchor[0], anchor[1], tuple(((h,), (j,)) for h, j in K))


def test_coeff_vector_examples():
    assert coeff_vector((2,), (1,), (3,), (1,)) == (-2, -1, -5)
    assert coeff_vector((1,), (1,), (1,), (1,)) == (0, 0, 0)
    assert coeff_vector((1,), (0,), (0,), (0,)) == (0, -1, 0)
    assert monomials(1, 1) == [(0, 1), (1, 0), (1, 1)]
    assert delta_dim(2, 3) == 11


@pytest.mark.parametrize("d,e", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_coeff_vector_exhaustive(d, e):
    H = 2 if d + e <= 3 else 1
    pts = box_params(d + e, H)
    bound = entry_bound(H)
    mons = monomials(d, e)
    for a in pts:
        for b in pts:
            v = coeff_vector(b[:d], a[:d], b[d:], a[d:])
            assert len(v) == delta_dim(d, e)
            assert (not any(v)) == (a == b)
            assert max(map(abs, v)) <= bound
            # direct evaluation at a random point agrees with the expansion
            g0, k0, g, k = (1, *a[:d]), (1, *a[d:]), (1, *b[:d]), (1, *b[d:])
            X, Y = [3, -1, 2][: d + 1], [2, 5, -3][: e + 1]
            direct = sum(g0[i] * X[i] for i in range(d + 1)) * sum(k0[i] * Y[i] for i in range(e + 1))
            direct -= sum(g[i] * X[i] for i in range(d + 1)) * sum(k[i] * Y[i] for i in range(e + 1))
            assert direct == sum(c * X[i] * Y[j] for (i, j), c in zip(mons, v))


def test_max_independent_subset_examples():
    same = CoeffSystem(1, 1, 3, (1,), (1,), (((2,), (3,)), ((2,), (3,))))
    assert max_independent_subset(same) == ([0], 1)
    two = line_system((2, 3), (2, 5))
    assert max_independent_subset(two) == ([0, 1], 2)
    # a pair of rows whose 2x2 minors share the factor 3: rank 2 over Q, 1 over F_3
    found = None
    for (h1, j1), (h2, j2) in product(product(range(-4, 5), repeat=2), repeat=2):
        s = line_system((h1, j1), (h2, j2))
        if s.rank() == 2 and minors_gcd(s.matrix(), 2) % 3 == 0 and s.rank(3) == 1:
            found = s
            break
    assert found is not None
    assert max_independent_subset(found, 3)[1] == 1
    with pytest.raises(DomainError):
        max_independent_subset(CoeffSystem(1, 1, 1, (0,), (0,), ()))


def test_z1_factor_examples():
    assert z1_factor(line_system((2, 3))) == 2
    assert z1_factor(line_system((1, 1))) == 1


@given(st.integers(0, 10**6))
def test_rank_agreement_off_z1(seed):
    rng = random.Random(seed)
    d, e = rng.choice([(1, 1), (1, 2), (2, 1), (2, 2)])
    H = 2
    pts = box_params(d + e, H)
    a = rng.choice(pts)
    K = rng.sample(pts, rng.randint(1, 6))
    sys = CoeffSystem(d, e, H, a[:d], a[d:], tuple((q[:d], q[d:]) for q in K))
    z = z1_factor(sys)
    assert z <= hadamard_factor_bound(d, e, H)
    for p in primes_up_to(60):
        if z % p:
            assert sys.rank(p) == sys.rank()
        else:
            assert sys.rank(p) <= sys.rank()


def test_variety_examples():
    one = line_system((2, 3))
    assert count_variety_points(one).value is None
    two = line_system((2, 3), (2, 5))
    assert two.rows == ((-2, -1, -5), (-4, -1, -9))
    assert count_variety_points(two).value == 1
    assert count_variety_points(two, 2).value is None
    assert count_variety_points(two, 3).value == 1
    assert exceptional_primes(two) == [2] == sweep_exceptional(two, 1000)
    w = rational_witness(two)
    assert w.rho == (-2, 1) and w.tau == (-1, 1) and w.annihilates(two)
    w = rational_witness(one)
    assert w.annihilates(one) and all(x.denominator == 1 for x in w.rho + w.tau)
    # parallel lines: proportional x0, y0 coefficients, inconsistent constants
    inconsistent = None
    for (h1, j1), (h2, j2) in product(product(range(-5, 6), repeat=2), repeat=2):
        s = line_system((h1, j1), (h2, j2))
        if rank([r[:2] for r in s.rows]) == 1 and s.rank() == 2:
            inconsistent = s
            break
    assert inconsistent is not None
    assert count_variety_points(inconsistent).value == 0
    assert rational_witness(inconsistent) is None


def test_exceptional_determinant_15():
    found = None
    for (h1, j1), (h2, j2) in product(product(range(-6, 7), repeat=2), repeat=2):
        s = line_system((h1, j1), (h2, j2))
        a = [r[:2] for r in s.rows]
        if abs(a[0][0] * a[1][1] - a[0][1] * a[1][0]) == 15:
            found = s
            break
    assert found is not None
    assert exceptional_primes(found) == [3, 5] == sweep_exceptional(found, 1000)
    assert exceptional_certificate(found) % 15 == 0


def test_unimodular_has_no_exceptions():
    s = line_system((2, 1), (1, 2))
    assert [r[:2] for r in s.rows] == [(0, -1), (-1, 0)]
    assert exceptional_primes(s) == []


@given(st.integers(0, 10**6))
def test_local_global_linear(seed):
    rng = random.Random(seed)
    H = rng.randint(1, 6)
    pts = box_params(2, H)
    a = rng.choice(pts)
    K = rng.sample(pts, rng.randint(1, 4))
    s = CoeffSystem(1, 1, H, a[:1], a[1:], tuple((q[:1], q[1:]) for q in K))
    ex = exceptional_primes(s)
    assert ex == sweep_exceptional(s, 1000)
    cert = exceptional_certificate(s)
    assert all(cert % q == 0 for q in ex)
    rep = exceptional_report(s, 1000)
    assert rep.within_bound


def sym_count(polys, n, p=None):
    xs = sympy.symbols(f"v0:{n}")
    F = [sum(c * sympy.prod([x**k for x, k in zip(xs, m)]) for m, c in f.items()) for f in polys]
    F = [f for f in F if f != 0]
    kw = {"modulus": p} if p else {}
    G = sympy.groebner(F, *xs, order="lex", **kw)
    if list(G.exprs) == [1]:
        return 0
    if not G.is_zero_dimensional:
        return None
    ex = list(G.exprs)
    shape = len(ex) == n and ex[-1].free_symbols <= {xs[-1]}
    shape = shape and all(
        sympy.Poly(g, *xs).LM(order="lex") == sympy.Poly(xs[i], *xs).LM(order="lex") for i, g in enumerate(ex[:-1])
    )
    if shape:
        return sympy.sqf_part(sympy.Poly(ex[-1], xs[-1])).degree()
    return len(sympy.solve_poly_system(ex, *xs))


class _Timeout(Exception):
    pass


def _alarm(*_):
    raise _Timeout


def test_groebner_counts_against_sympy():
    rng = random.Random(1)
    old = signal.signal(signal.SIGALRM, _alarm)
    agree = 0
    try:
        for _ in range(80):
            d, e = rng.choice([(2, 1), (1, 2), (2, 2)])
            pts = box_params(d + e, 2)
            anchor = rng.choice(pts)
            K = rng.sample([q for q in pts if q != anchor], rng.randint(1, 5))
            sys = CoeffSystem(d, e, 2, anchor[:d], anchor[d:], tuple((q[:d], q[d:]) for q in K))
            mine = count_variety_points(sys).value
            signal.alarm(5)
            try:
                ref = sym_count(system_polys(sys), sys.nvars)
            except _Timeout:
                continue
            finally:
                signal.alarm(0)
            assert mine == ref, sys.payload()
            agree += 1
    finally:
        signal.signal(signal.SIGALRM, old)
    assert agree >= 60


def test_groebner_mod_p_against_sympy():
    rng = random.Random(9)
    checked = 0
    for _ in range(40):
        d, e = rng.choice([(2, 1), (1, 2)])
        pts = box_params(d + e, 1)
        anchor = rng.choice(pts)
        K = rng.sample([q for q in pts if q != anchor], rng.randint(2, 4))
        sys = CoeffSystem(d, e, 1, anchor[:d], anchor[d:], tuple((q[:d], q[d:]) for q in K))
        for p in (2, 3, 5):
            mine = count_variety_points(sys, p).value
            if mine is None:
                continue
            # brute force over F_p is a lower bound; equality when all points are rational
            polys = system_polys(sys)
            n = sys.nvars
            rational = sum(
                1
                for v in product(range(p), repeat=n)
                if all(sum(c * _mono(v, m) for m, c in f.items()) % p == 0 for f in polys)
            )
            assert rational <= mine
            checked += 1
    assert checked > 10


def _mono(v, m):
    out = 1
    for x, k in zip(v, m):
        out *= x**k
    return out


def test_variety_shape_limits():
    s = CoeffSystem(3, 2, 1, (0, 0, 0), (0, 0), (((1, 0, 0), (0, 0)),))
    with pytest.raises(UnsupportedError):
        count_variety_points(s)
    s = CoeffSystem(2, 1, 1, (0, 0), (0,), (((1, 0), (0,)),))
    with pytest.raises(UnsupportedError):
        exceptional_primes(s)


def test_rational_witness_finite_nonlinear():
    rng = random.Random(4)
    found = 0
    for _ in range(100):
        d, e = rng.choice([(2, 1), (1, 2)])
        pts = box_params(d + e, 2)
        anchor = rng.choice(pts)
        K = rng.sample([q for q in pts if q != anchor], rng.randint(2, 5))
        sys = CoeffSystem(d, e, 2, anchor[:d], anchor[d:], tuple((q[:d], q[d:]) for q in K))
        w = rational_witness(sys)
        if w is not None:
            assert w.annihilates(sys)
            found += 1
    assert found > 20


def test_witness_invariant():
    from gapfield.bilinear.variety import WitnessPoint

    with pytest.raises(InvariantViolation):
        WitnessPoint((Fraction(0), Fraction(2)), (Fraction(0), Fraction(1)))


def test_z0_examples():
    assert z0(1, 3, 2).factors == {2: 1, 3: 1, 5: 1}
    assert z0(1, 1, 2).factors == {2: 1}


def test_z_de_small():
    rep = z_de(1, 1, 1)
    assert rep.small_primes_divide() and rep.max_prime_ok()
    assert rep.total.factors.keys() == {2, 3}
    assert rep.triples == 828
    with pytest.raises(UnsupportedError):
        z_de(1, 2, 1)


def test_bound_examples():
    assert bd.gamma(3) == Fraction(1, 786432) == Fraction(1, 48 * 2**14)
    assert bd.delta(2) == Fraction(1, 114 * 2**32) == bd.gamma(9)
    assert bd.cs_rank(2) == 4
    v = bd.doss_log_bound(1, 2, 1, 0)
    mpmath.mp.dps = 50
    assert abs(v - Decimal(mpmath.nstr(209 * mpmath.log(7) * 32, 45))) < Decimal("1e-30")
    assert abs(v - Decimal("13014.2")) < 1
    assert bd.main_logz_exponent(1, 1) == 8
    assert bd.exception_exponent_gap(1, 1) == 10
    assert bd.exception_exponent_doubling(2) == 80
    assert bd.smoothness_exponent(1, 1) == 1 / bd.gamma(3)
    assert bd.all_prime_regime(1, 1, 1, 10007)["holds"]
    for f, args in ((bd.gamma, (0,)), (bd.delta, (-1,)), (bd.doss_log_bound, (0, 1, 1, 1))):
        with pytest.raises(DomainError):
            f(*args)


@given(st.integers(1, 6), st.integers(1, 6), st.integers(1, 8))
def test_main_exponent_dominates(d, e, H):
    assert bd.main_logz_exponent(d, e) >= (d + e) * (d + 1) * (e + 1)
    assert bd.logz_bound(d, e, H + 1) >= bd.logz_bound(d, e, H)
