"""Python bindings for the probin p-Laplacian eigenvalue library."""

from ._probin import (
    DiscreteDomain,
    Eigenpair,
    Measurement,
    ProbinError,
    annulus_domain,
    boundary_flux,
    bv_step_quotient,
    effective_h,
    emit_default_config,
    energy,
    forward_measure,
    interval_domain,
    lambda_derivative,
    linearized_matrix,
    linf_rayleigh_eval,
    measurement_distance,
    mesh_from_text,
    p_limit_classify_inf,
    principal_eigenpair,
    radial_domain,
    rayleigh_quotient,
    roundtrip_config,
    solve_linearized,
)

__all__ = [
    "DiscreteDomain",
    "Eigenpair",
    "Measurement",
    "ProbinError",
    "annulus_domain",
    "boundary_flux",
    "bv_step_quotient",
    "effective_h",
    "emit_default_config",
    "energy",
    "forward_measure",
    "interval_domain",
    "lambda_derivative",
    "linearized_matrix",
    "linf_rayleigh_eval",
    "measurement_distance",
    "mesh_from_text",
    "p_limit_classify_inf",
    "principal_eigenpair",
    "radial_domain",
    "rayleigh_quotient",
    "roundtrip_config",
    "solve_linearized",
]
