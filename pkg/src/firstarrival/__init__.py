"""Path-length, range-bias and arrival-angle laws of the first-arriving reflection
in a Boolean model of square reflectors, with a Monte Carlo oracle."""

__version__ = "0.1.0"

from .analytic import (
    IntensityResult,
    ToaDistribution,
    bias_from_toa,
    intensity,
    no_visible_reflection_probability,
    toa_with_blocking,
    toa_without_blocking,
)
from .aoa import aoa_bin_probabilities, aoa_support, conditional_aoa_atoms, marginal_aoa_pdf
from .approx import Family, MomentMatching, bias_moments, fit_family, kl_divergence
from .blocking import BooleanModelParams, DiscreteUniform, visibility_probability
from .curves import DistributionCurve, empirical_cdf, ks_distance
from .geometry import DomainError, Quadrant, Reflector, TestLink
from .montecarlo import BlockingMode, SimulationConfig, simulate_first_arrival

__all__ = [
    "BlockingMode",
    "BooleanModelParams",
    "DiscreteUniform",
    "DistributionCurve",
    "DomainError",
    "Family",
    "IntensityResult",
    "MomentMatching",
    "Quadrant",
    "Reflector",
    "SimulationConfig",
    "TestLink",
    "ToaDistribution",
    "aoa_bin_probabilities",
    "aoa_support",
    "bias_from_toa",
    "bias_moments",
    "conditional_aoa_atoms",
    "empirical_cdf",
    "fit_family",
    "intensity",
    "kl_divergence",
    "ks_distance",
    "marginal_aoa_pdf",
    "no_visible_reflection_probability",
    "simulate_first_arrival",
    "toa_with_blocking",
    "toa_without_blocking",
    "visibility_probability",
]
