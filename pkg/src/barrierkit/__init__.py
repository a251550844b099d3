"""Barriers of convex bodies: convexification, projection bodies, weak-barrier
decisions and stability estimates for finite piecewise-linear sets."""

from .analysis import (CertifiedBool, CylinderReport, StrongBarrierEstimate, Verdict,
                       cylinder_counterexample, is_weak_barrier, is_weak_barrier_2d_prop1,
                       jones_deficit, mc_multiplicity_area, multiplicity_projection_area,
                       strong_barrier_mc)
from .convexification import MinkowskiSolution, convexify, convexify_2d, solve_minkowski
from .errors import (ContainmentError, DegenerateError, FormatError, InvalidDataError,
                     NotConvergedError)
from .geometry import (Ball, Polytope, Zonotope, ball_bounds, central_symmetral_2d, icosphere,
                       kappa, minkowski_sum_2d, omega, zonotope)
from .measures import (Barrier, DirectionalMeasure, blaschke_measure,
                       mean_width_projection_identity, orientation_measure, projection_body,
                       projection_function, surface_area_measure, validate_minkowski_data)
from .stability import (StabilityReport, corollary_witness_function, dbl, dlp_upper_bound,
                        jbeta_mass, lemma1_check, lemma3_check, stability_exponent,
                        stability_report)

__version__ = "0.1.0"
