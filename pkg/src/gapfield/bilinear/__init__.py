"""Bilinear coefficient systems, their varieties, exceptional moduli and bounds."""

from .moduli import ZReport, z0, z1_product, z_de
from .system import CoeffSystem, coeff_vector, max_independent_subset, monomials, z1_factor
from .variety import (
    VarietyCount,
    WitnessPoint,
    count_variety_points,
    exceptional_primes,
    rational_witness,
    sweep_exceptional,
)

__all__ = [
    "CoeffSystem",
    "VarietyCount",
    "WitnessPoint",
    "ZReport",
    "coeff_vector",
    "count_variety_points",
    "exceptional_primes",
    "max_independent_subset",
    "monomials",
    "rational_witness",
    "sweep_exceptional",
    "z0",
    "z1_factor",
    "z1_product",
    "z_de",
]
