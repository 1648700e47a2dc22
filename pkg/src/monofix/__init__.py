"""Generators of K(x1, x2, x3)^G for finite 2-groups G of monomial automorphisms."""

from .case_pipeline import RationalityReport, construct_generators, identify_class, normalize_coefficients
from .coeff_field import TowerField
from .config import PipelineConfig, SweepConfig
from .monomial_action import MonomialAutomorphism, MonomialGroup, group_closure, parse_action_spec
from .ratfunc import RationalFunction, Ring
from .verifier import check_invariance, check_transcendence, validate_certificate

__version__ = "0.1.0"

__all__ = ["RationalityReport", "construct_generators", "identify_class", "normalize_coefficients", "TowerField",
           "PipelineConfig", "SweepConfig", "MonomialAutomorphism", "MonomialGroup", "group_closure",
           "parse_action_spec", "RationalFunction", "Ring", "check_invariance", "check_transcendence",
           "validate_certificate"]
