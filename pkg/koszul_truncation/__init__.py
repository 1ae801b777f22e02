"""Truncated Koszul complexes over monomial quotients.

This package builds Koszul complexes of a weighted system of monomials truncated along the
q-adic filtration, computes their graded homology over a prime field, checks the Euler
characteristic identities for multiplicities and stabilizes the Cech-type colimits.
"""

from koszul_truncation.builders import (
    WeightedSystem,
    build_complex,
    co_koszul,
    co_quotient_L,
    koszul,
    quotient_L,
    sub_co_koszul,
    sub_koszul,
)
from koszul_truncation.cech import cech_H, cech_L, local_cohomology, saturation_power, star_check
from koszul_truncation.complexes import ComplexSpec, HomologyTable, homology_dims
from koszul_truncation.errors import EngineError
from koszul_truncation.instance import EngineParams, InstanceFile, load_instance
from koszul_truncation.monomials import (
    CyclicModule,
    Monomial,
    MonomialIdeal,
    NegPowerConvention,
    parse_ideal,
    parse_monomial,
)
from koszul_truncation.multiplicity import chi_K_stable, e0, verify_mult1, verify_mult2

__version__ = "0.1.0"

__all__ = [
    "Monomial",
    "MonomialIdeal",
    "CyclicModule",
    "NegPowerConvention",
    "parse_monomial",
    "parse_ideal",
    "ComplexSpec",
    "HomologyTable",
    "homology_dims",
    "WeightedSystem",
    "koszul",
    "co_koszul",
    "sub_koszul",
    "quotient_L",
    "sub_co_koszul",
    "co_quotient_L",
    "build_complex",
    "e0",
    "chi_K_stable",
    "verify_mult1",
    "verify_mult2",
    "cech_H",
    "cech_L",
    "local_cohomology",
    "saturation_power",
    "star_check",
    "EngineError",
    "EngineParams",
    "InstanceFile",
    "load_instance",
]
