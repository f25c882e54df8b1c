"""Gaussian correlation budget of ghost imaging sources.

Closed-form discord and mutual information of two-mode Gaussian states,
the thermal and SPDC source models, SNR formulas, a photon-counting
Monte Carlo and a lensless propagation model.
"""
from .errors import (
    DomainError,
    GhostCorrError,
    InconsistentStateError,
    InsufficientDataError,
    NumericDegeneracyError,
    ResolutionError,
)
from .gaussian_core import (
    CorrelationBreakdown,
    SymplecticSpectrum,
    TwoModeCovariance,
    correlations,
    entropy_f,
    measurement_oracle,
    mutual_information,
    optimal_conditional_determinant,
    symplectic_spectrum,
)
from .snr import ratio_limit, snr_entangled, snr_limit, snr_thermal
from .sources import Family, SourceSpec, coarse_grained, microscopic_pair

__version__ = "0.1.0"

__all__ = [
    "CorrelationBreakdown",
    "DomainError",
    "Family",
    "GhostCorrError",
    "InconsistentStateError",
    "InsufficientDataError",
    "NumericDegeneracyError",
    "ResolutionError",
    "SourceSpec",
    "SymplecticSpectrum",
    "TwoModeCovariance",
    "coarse_grained",
    "correlations",
    "entropy_f",
    "measurement_oracle",
    "microscopic_pair",
    "mutual_information",
    "optimal_conditional_determinant",
    "ratio_limit",
    "snr_entangled",
    "snr_limit",
    "snr_thermal",
    "symplectic_spectrum",
]
