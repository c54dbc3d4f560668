"""Exact laboratory for multiplicative Diophantine transference."""

__version__ = "0.1.0"

from .core import IntegerPair, RationalMatrix, pi_power, pi_prime_power
from .delta import delta, delta_bounds_report
from .exponents import (beta_lower_from_mbeta, dyson_map, estimate_exponents,
                        jarnik_identity_check, tr_beta_lower, trivial_bounds_check, uniform_maps)
from .search import SearchBudget, badness_infimum, best_approximations, find_witness
from .secdual import (AxisBox, Parallelepiped, TupleSpec, box_section_volume, check_wedge_lemma,
                      in_wedge, wedge_gauge)
from .transfer import (FunctionSpec, QualityBudget, chi_from_psi, make_budget, phi_from_psi,
                       verify_mahler, verify_multitrans)

__all__ = [
    "AxisBox", "FunctionSpec", "IntegerPair", "Parallelepiped", "QualityBudget",
    "RationalMatrix", "SearchBudget", "TupleSpec", "badness_infimum", "best_approximations",
    "beta_lower_from_mbeta", "box_section_volume", "check_wedge_lemma", "chi_from_psi", "delta",
    "delta_bounds_report", "dyson_map", "estimate_exponents", "find_witness", "in_wedge",
    "jarnik_identity_check", "make_budget", "phi_from_psi", "pi_power", "pi_prime_power",
    "tr_beta_lower", "trivial_bounds_check", "uniform_maps", "verify_mahler", "verify_multitrans",
    "wedge_gauge",
]
