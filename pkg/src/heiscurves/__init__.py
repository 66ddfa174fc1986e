"""Invariants, classification and reconstruction of horizontally regular curves in the Heisenberg groups."""

from .classify import OrderReport, Reduction, curve_order, reduce_degenerate, totally_real, wronskian_nonzero
from .curve import (HorizontalJet, SampledCurve, arclength_reparametrize, derivatives_at,
                    is_horizontally_regular, velocity_decomposition)
from .exceptions import (ConditioningError, DegeneracyError, FormatError, HeisenbergError, InconsistencyError,
                         NotRegularError, ResolutionError, StepSizeError)
from .frames import FrameState, InvariantProfile, build_frame, darboux_matrix, invariants_along
from .geodesics import GeodesicSpec, geodesic_curve
from .heis_core import (HPoint, Symmetry, TangentVector, apply_symmetry, contact_theta, group_inv, group_mul,
                        j_apply, levi_inner, symmetry_to_matrix)
from .synth import GroupPath, congruence_test, integrate_frame_ode, synthesize_curve

__version__ = "0.1.0"
