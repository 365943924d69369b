"""Numeric workbench for generalized Yang Poisson models on canonical phase space."""

from .algebra import ResidualReport, check_relations, jacobi_suite, relation_set
from .brackets import bracket_field, poisson_bracket, pullback
from .config import RunConfig, parse_config
from .errors import (ConfigError, DegenerateFrame, DomainError, InvalidParams, NoPeriodDetected,
                     SamplingExhausted, SingularProfile, YPLError)
from .phasespace import ModelParams, PhasePoint, SampleSpec, sample_points
from .realizations import (GenParams, GeneratorSet, born_dual, generalized_generators,
                           profile_preset, snyder_realization, universal_h, yang_special)

__version__ = "0.1.0"
