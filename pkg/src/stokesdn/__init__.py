"""Boundary symbol calculus for a shifted Stokes system on a manifold collar.

The package assembles the second-order elliptic system equivalent to the
variable-viscosity Stokes equations near a boundary, factorizes it into
normal-direction first-order factors modulo smoothing, evaluates the graded
factor symbols in closed form, validates them against an exact layered-medium
ODE oracle, and recovers the viscosity and its normal derivative at the
boundary from Dirichlet-to-Neumann symbol data.
"""

__version__ = "0.1.0"

from .equivalence import (FieldPair, StokesState, divergence_identity_gap,
                          identity_suite, layered_manufacture, lift_solution,
                          lifted_stokes_residual, new_system_residual,
                          stokes_residual)
from .factorization import (FactorizationResult, factor_symbol,
                            factorization_residual, full_symbol, principal_q1)
from .fields import (MetricField, ScalarField, catalog_metrics, get_metric,
                     metric_curved, metric_flat, metric_hyperbolic,
                     metric_perturbed, mu_boundary_sine, mu_constant,
                     mu_layered, scalar_from_expression)
from .geometry import GeometryJet, lemma21_residual, verify_boundary_normal_form
from .interior import InteriorSymbols, ProblemData, interior_symbols
from .oracle import (LayeredProfile, asymptotic_dn, constant_profile,
                     convergence_report, default_profiles, layered_ode_dn,
                     mesh_refinement_gap)
from .recovery import (RecoveryReport, boundary_factors, fit_t_from_q1,
                       mu_from_t, normal_derivative_from_q0,
                       roundtrip_recover, t_from_mu)
from .symbols import (CotangentSample, GradedSymbol, as_sample,
                      homogeneity_check, value_matrix)

__all__ = [
    "__version__",
    "FieldPair", "StokesState", "divergence_identity_gap", "identity_suite",
    "layered_manufacture", "lift_solution", "lifted_stokes_residual",
    "new_system_residual", "stokes_residual",
    "FactorizationResult", "factor_symbol", "factorization_residual",
    "full_symbol", "principal_q1",
    "MetricField", "ScalarField", "catalog_metrics", "get_metric",
    "metric_curved", "metric_flat", "metric_hyperbolic", "metric_perturbed",
    "mu_boundary_sine", "mu_constant", "mu_layered", "scalar_from_expression",
    "GeometryJet", "lemma21_residual", "verify_boundary_normal_form",
    "InteriorSymbols", "ProblemData", "interior_symbols",
    "LayeredProfile", "asymptotic_dn", "constant_profile",
    "convergence_report", "default_profiles", "layered_ode_dn",
    "mesh_refinement_gap",
    "RecoveryReport", "boundary_factors", "fit_t_from_q1", "mu_from_t",
    "normal_derivative_from_q0", "roundtrip_recover", "t_from_mu",
    "CotangentSample", "GradedSymbol", "as_sample", "homogeneity_check",
    "value_matrix",
]
