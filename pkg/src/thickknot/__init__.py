"""Moebius energy, thickness and ropelength bounds for polygonal knots."""

from .bounds import (L_MIN, BoundReport, advantage_onset, bound_report, crossover,
                     detailed_bound, distal_inner_bound, ell_star, ell_star_at2,
                     ell_star_closed, p_constant, power_bound, quadratic_bound,
                     sweep_ratio)
from .energy import (EnergyBreakdown, QuadratureConfig, average_crossing_number,
                     circle_inner_integral, discrete_energy, e_reg_closed_form,
                     energy_gradient, mobius_energy, total_curvature, writhe)
from .estimators import (EnergyRelaxer, KnotThickness, KnotVerifier, MobiusEnergy,
                         ThicknessNormalizer)
from .exceptions import (BadParameter, BelowDomain, DegenerateEdge, KnotError,
                         NonconvergentSample, NoSignChange, NotSimple,
                         SelfIntersecting, TooFewVertices)
from .geometry import (ArcPoint, PolylineKnot, arc_distance, build_knot, make_circle,
                       make_torus_knot, mirror, perturb, point_at, scale_knot)
from .io import read_knot, write_knot
from .relax import RelaxTrace, relax
from .thickness import ThicknessReport, dcsd, min_rad, normalize, thickness
from .verify import (CheckResult, VerificationReport, audit_consistency, check_ix_dist,
                     check_lemma3, check_proximal_bound, check_schur, shell_occupancy,
                     verify_knot)

__version__ = "0.1.0"
