"""Collective emission of two-level impurity atoms in a band-gap medium.

Semiclassical simulator for ensembles whose transition lies inside a
polariton band gap: suppressed single-atom emission, collective burst
dynamics and partial localization of the excitation.  Provides direct
per-atom integration, a closed two-variable averaged model, coupling and
band-structure calculators, burst/plateau analysis and a CLI.
"""

from ._kernels import BACKEND_NAME
from .analysis import (
    BurstReport,
    StationaryReport,
    TimeSeries,
    classify_regime,
    detect_bursts,
    stationary_excitation,
)
from .averaged import FixedPoint, integrate_averaged, stationary_point
from .config import RunConfig, canonical_text, default_config, parse_config
from .couplings import (
    CouplingSummary,
    collective_frequency,
    collective_width,
    coupling_vectors,
    critical_alpha,
    critical_alpha_or_none,
    eta_infinity,
    summarize,
)
from .dynamics import coupling_matrix, counter_matrix, integrate_direct
from .errors import (
    ConfigError,
    DegenerateInitialState,
    EmptySeries,
    GapburstError,
    HistoryUnderflow,
    InvalidParameter,
    MinimumSeparationViolated,
    NoFixedPointInGainRegime,
    NonpositiveGamma,
    NotStationary,
    StepSizeTooLarge,
)
from .field import (
    AlphaEstimate,
    FieldModel,
    alpha_effective,
    make_bath,
    sample_field,
)
from .geometry import Ensemble, chain, cubic, explicit, random_sphere
from .spectrum import (
    MediumModel,
    PolaritonBands,
    classify_frequency,
    matter_branch,
    polariton_branches,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND_NAME",
    "BurstReport",
    "ConfigError",
    "CouplingSummary",
    "DegenerateInitialState",
    "EmptySeries",
    "Ensemble",
    "FieldModel",
    "AlphaEstimate",
    "FixedPoint",
    "GapburstError",
    "HistoryUnderflow",
    "InvalidParameter",
    "MediumModel",
    "MinimumSeparationViolated",
    "NoFixedPointInGainRegime",
    "NonpositiveGamma",
    "NotStationary",
    "PolaritonBands",
    "RunConfig",
    "StationaryReport",
    "StepSizeTooLarge",
    "TimeSeries",
    "alpha_effective",
    "canonical_text",
    "chain",
    "classify_frequency",
    "classify_regime",
    "collective_frequency",
    "collective_width",
    "coupling_matrix",
    "counter_matrix",
    "coupling_vectors",
    "critical_alpha",
    "critical_alpha_or_none",
    "cubic",
    "default_config",
    "detect_bursts",
    "eta_infinity",
    "explicit",
    "integrate_averaged",
    "integrate_direct",
    "make_bath",
    "matter_branch",
    "parse_config",
    "polariton_branches",
    "random_sphere",
    "sample_field",
    "stationary_excitation",
    "stationary_point",
    "summarize",
]
