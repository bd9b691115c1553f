"""Exact and numerical verification of the boundary-bubble energy expansion.

The package reconstructs, in exact rational arithmetic, the fourth-order
energy expansion of the perturbed boundary bubble on a curved half-ball,
checks every closed-form integral against an independent quadrature oracle,
and confirms the predicted Sobolev-quotient drop numerically at desk scale
for dimensions 6, 7 and 8.
"""

__version__ = "0.1.0"

from .bubble_functions import BubbleParams, sharp_constant
from .curvature_model import (BoundaryCurvature, MetricJet, SymmetryViolation,
                              UnsupportedOrder, from_json_dict, load_curvature,
                              metric_inverse_jet, random_admissible,
                              to_json_dict, validate, weyl_is_zero,
                              weyl_reconstruct)
from .discrete_quotient import (QuotientConfig, energy_components,
                                evaluate_energy, evaluate_quotient, sweep)
from .energy_expansion import (CancellationFailure, Certificate,
                               ExpansionReport, PreconditionViolation,
                               apply_cancellation, assemble_expansion, certify,
                               coefficient_at, optimal_A, s_polynomial,
                               w2_coefficient)
from .exact_integrals import (DivergentIntegral, IntegralSpec, ParityMismatch,
                              ScaledRational, half_line_ratio,
                              halfspace_closed_form, integral_table,
                              unit_interval_power_integral)
from .quadrature_oracle import (QuadratureConfig, ToleranceNotMet, ball_qmc,
                                halfball_qmc, reduced_2d, sphere_mc)
from .sphere_moments import (HomPoly, SphereIntegral, jet_sphere_averages,
                             sphere_integral)

__all__ = [name for name in dir() if not name.startswith("_")]
