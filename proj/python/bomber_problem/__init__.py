"""Bomber Problem toolkit.

Closed-form optimal allocation K(x,t) and survival probability P(x,t) in
regions R1/R2, a grid solver for the defining integral equation, verification
checks, and Monte Carlo policy simulation.
"""

from ._bomber import (
    BoundaryEstimate,
    GridSpec,
    ModelParams,
    Policy,
    QuadratureConfig,
    Region,
    ResidualReport,
    RngStream,
    Scheme,
    SimConfig,
    SimResult,
    SolutionGrid,
    State,
    UnsupportedRegionError,
    boundary_detect,
    boundary_f,
    boundary_f_inverse,
    classify_region,
    closed_form_K,
    closed_form_P,
    estimate_survival,
    g1,
    inner_max,
    interpolate,
    numeric_K,
    numeric_P,
    q2,
    q_integrand,
    residual_check,
    simulate_mission,
    solve_integral_equation,
    survival_kernel,
    unimodal_argmax,
)

__all__ = [
    "BoundaryEstimate",
    "GridSpec",
    "ModelParams",
    "Policy",
    "QuadratureConfig",
    "Region",
    "ResidualReport",
    "RngStream",
    "Scheme",
    "SimConfig",
    "SimResult",
    "SolutionGrid",
    "State",
    "UnsupportedRegionError",
    "boundary_detect",
    "boundary_f",
    "boundary_f_inverse",
    "classify_region",
    "closed_form_K",
    "closed_form_P",
    "estimate_survival",
    "g1",
    "inner_max",
    "interpolate",
    "numeric_K",
    "numeric_P",
    "q2",
    "q_integrand",
    "residual_check",
    "simulate_mission",
    "solve_integral_equation",
    "survival_kernel",
    "unimodal_argmax",
]
