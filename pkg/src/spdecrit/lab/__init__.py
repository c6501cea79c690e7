"""Desk-scale numerical experiments backing the symbolic analyzer."""

from .fields import (
    PeriodicField,
    Trajectory,
    ResolutionError,
    synthetic_field,
    littlewood_paley_blocks,
    lp_fields,
    estimate_holder_exponent,
    holder_quotient_exponent,
    bony_decompose,
)
from .noise import sample_spatial_white, solve_z1_mild
from .heat import (
    BlowupError,
    SmoothTestFunction,
    solve_damped_heat,
    weak_residual,
    steklov_average,
    proof_inequality_gap,
    proof_inequality_gap_exact,
    power_difference_residual,
    l1_contraction_curve,
)
from .tychonov import TychonovSeries, tychonov_eval, tychonov_residual, fd_heat_residual

__all__ = [
    "PeriodicField",
    "Trajectory",
    "ResolutionError",
    "BlowupError",
    "SmoothTestFunction",
    "TychonovSeries",
    "synthetic_field",
    "littlewood_paley_blocks",
    "lp_fields",
    "estimate_holder_exponent",
    "holder_quotient_exponent",
    "bony_decompose",
    "sample_spatial_white",
    "solve_z1_mild",
    "solve_damped_heat",
    "weak_residual",
    "steklov_average",
    "proof_inequality_gap",
    "proof_inequality_gap_exact",
    "power_difference_residual",
    "l1_contraction_curve",
    "tychonov_eval",
    "tychonov_residual",
    "fd_heat_residual",
]
