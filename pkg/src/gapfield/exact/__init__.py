"""Exact arithmetic substrate: primes, residues, integer matrices, polynomials."""

from .arith import (
    ResidueElem,
    divisors,
    factorize,
    inv_mod,
    is_prime,
    prime_factors,
    primes_between,
    primes_up_to,
    sqrt_minus_one,
)
from .factored import FactoredInteger
from .matrix import (
    adjugate,
    det_cofactor,
    det_fraction_free,
    gram_det,
    kernel_basis,
    rank,
)
from .poly import UniPoly, squarefree_degree

__all__ = [
    "FactoredInteger",
    "ResidueElem",
    "UniPoly",
    "adjugate",
    "det_cofactor",
    "det_fraction_free",
    "divisors",
    "factorize",
    "gram_det",
    "inv_mod",
    "is_prime",
    "kernel_basis",
    "prime_factors",
    "primes_between",
    "primes_up_to",
    "rank",
    "sqrt_minus_one",
    "squarefree_degree",
]
