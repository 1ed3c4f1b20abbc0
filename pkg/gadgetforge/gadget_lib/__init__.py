from .bounds import (
    f_exponent,
    high_order_bound_report,
    ot06_subdivision_delta_bound,
    ot06_subdivision_delta_bound_exact,
    parallel_high_order_bound,
    parallel_high_order_tail_bound,
    parallel_subdivision_delta_bound,
    parallel_vs_vf,
    subdivision_delta_bound,
    three_to_two_delta_bound,
)
from .common import GadgetAssembler, in_transverse_ising_family, in_zzxx_family, sgn
from .creation import build_fifth_order_zzz_gadget, build_yy_gadget
from .parallel_three_body import build_parallel_three_to_two_gadget, commutation_profile
from .subdivision import build_parallel_subdivision_gadget, build_subdivision_gadget, subdivision_coefficients
from .three_body import build_three_to_two_gadget, three_to_two_coefficients

__all__ = [
    "GadgetAssembler",
    "build_fifth_order_zzz_gadget",
    "build_parallel_subdivision_gadget",
    "build_parallel_three_to_two_gadget",
    "build_subdivision_gadget",
    "build_three_to_two_gadget",
    "build_yy_gadget",
    "commutation_profile",
    "f_exponent",
    "high_order_bound_report",
    "in_transverse_ising_family",
    "in_zzxx_family",
    "ot06_subdivision_delta_bound",
    "ot06_subdivision_delta_bound_exact",
    "parallel_high_order_bound",
    "parallel_high_order_tail_bound",
    "parallel_subdivision_delta_bound",
    "parallel_vs_vf",
    "sgn",
    "subdivision_coefficients",
    "subdivision_delta_bound",
    "three_to_two_coefficients",
    "three_to_two_delta_bound",
]
