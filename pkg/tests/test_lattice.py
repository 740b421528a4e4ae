import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gapfield.errors import DomainError, InvariantViolation
from gapfield.exact import rank
from gapfield.lattice import LatticeBasis, kernel_lattice, ratio_extraction, reduced_basis, span_lattice


def test_kernel_lattice_examples():
    L = kernel_lattice([1, 2, 3])
    assert L.rank == 2 and L.gram_det == 14
    L = kernel_lattice([1, 0, 0])
    assert L.rank == 2 and L.gram_det == 1 and all(r[0] == 0 for r in L.rows)
    L = kernel_lattice([Fraction(1, 2), Fraction(1, 3)])
    assert L.rank == 1 and L.rows[0] in ((2, -3), (-2, 3))
    with pytest.raises(DomainError):
        kernel_lattice([0, 0])


@given(st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=7), min_size=2, max_size=5).filter(lambda a: any(a)))
def test_kernel_lattice_orthogonal(alpha):
    L = kernel_lattice(alpha)
    assert L.rank == len(alpha) - 1
    for r in L.rows:
        assert sum(a * x for a, x in zip(alpha, r)) == 0
    # saturation: Gram det equals the squared norm of the primitive integer normal
    den = math.lcm(*(Fraction(a).denominator for a in alpha))
    v = [int(a * den) for a in alpha]
    g = math.gcd(*v)
    assert L.gram_det == sum((x // g) ** 2 for x in v)


def test_reduced_basis_examples():
    r = reduced_basis(span_lattice([[1, 0], [0, 1]], 2))
    assert [list(b) for b in r.basis.rows] == [[1, 0], [0, 1]] and r.c1 == pytest.approx(1)
    r = reduced_basis(span_lattice([[1, 0], [1000, 1]], 2))
    assert [list(b) for b in r.basis.rows] == [[1, 0], [0, 1]]
    r = reduced_basis(span_lattice([[2, 0], [1, 1]], 2))
    assert sorted(map(tuple, r.basis.rows)) == [(1, -1), (1, 1)]
    assert r.basis.gram_det == 4 and r.basis.det == pytest.approx(2) and r.c1 == pytest.approx(1)
    with pytest.raises(DomainError):
        reduced_basis(LatticeBasis((), 2))


def test_reduced_basis_certificates_random():
    rng = random.Random(5)
    worst_c2 = 0.0
    for _ in range(60):
        m = rng.randint(1, 5)
        dim = rng.randint(m, 6)
        while True:
            rows = [[rng.randint(-30, 30) for _ in range(dim)] for _ in range(m)]
            if rank(rows) == m:
                break
        L = span_lattice(rows, dim)
        r = reduced_basis(L, samples=100, seed=rng.randrange(10**6))
        assert r.basis.gram_det == L.gram_det
        prod_sq = math.prod(sum(x * x for x in b) for b in r.basis.rows)
        assert prod_sq <= 4 ** (2 * m) * L.gram_det
        for b in L.rows:
            assert r.basis.contains(b)
        for b in r.basis.rows:
            assert L.contains(b)
        worst_c2 = max(worst_c2, r.c2)
    assert worst_c2 < 50


def test_ratio_examples():
    r = ratio_extraction([[3, -2, 0], [0, 2, -1]], alpha=[2, 3, 6], box=3)
    assert r.pivot == 2 and r.ratios == {0: Fraction(1, 3), 1: Fraction(1, 2)}
    r = ratio_extraction([[1, -1]], alpha=[1, 1], box=1)
    assert r.ratios == {0: 1}
    r = ratio_extraction([[2, -1, 0], [0, 1, -1]], alpha=[1, 2, 2])
    assert r.ratios == {0: Fraction(1, 2), 1: 1}
    with pytest.raises(InvariantViolation):
        ratio_extraction([[1, -1, 0], [2, -2, 0]])
    with pytest.raises(DomainError):
        ratio_extraction([[1, 1]], alpha=[1, 1])


def test_ratio_pivot_falls_back_when_last_alpha_vanishes():
    r = ratio_extraction([[0, 0, 1], [2, -1, 0]], alpha=[1, 2, 0])
    assert r.pivot == 1 and r.ratios == {0: Fraction(1, 2), 2: 0}
