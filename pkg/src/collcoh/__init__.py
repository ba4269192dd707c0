"""Collision-induced coherence in a five-level ion: master-equation dynamics,
dark/bright populations, emission spectra and visible/UV branching ratios."""

from .dressed import (DressedPopulations, asymptotic_dressed, dressed_rhs, from_dressed,
                      to_dressed)
from .dynamics import (Generator, Trajectory, Variant, assemble, assemble_five_level,
                       assemble_reduced, assemble_v_subsystem, evolve, spectral_gap,
                       steady_state)
from .emission import (Spectrum, branching_ratio_limits, branching_ratio_maxcoh,
                       branching_ratio_nocoh, branching_ratio_operational, correlation_widths,
                       enhancement_ratio, line_intensity, suppression_factor, uv_spectrum,
                       visible_spectrum)
from .errors import (CollcohError, ConfigError, DivisionByZero, NegativeWeight,
                     NonRealCoherence, SingularSystem, StiffnessFailure, TruncationError,
                     UnknownChannel)
from .model import DensityMatrix, RateSet, StateDiagnostics, diagnose, initial_state, trace
from .plasma import (Channel, PlasmaConditions, collision_rate, rate_coefficient,
                     thermal_branching_ratio)

__version__ = "0.1.0"
