"""Two-mode covariance matrices of ghost-imaging light sources.

Two families are modelled: a thermal beam split on a 50:50 beam splitter
(``thermal_split``) and a two-mode squeezed vacuum from down-conversion
(``spdc``).  ``mu`` is the mean photon number per mode and per beam.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .gaussian_core import CorrelationBreakdown, TwoModeCovariance, correlations


class Family(str, enum.Enum):
    THERMAL = "thermal_split"
    SPDC = "spdc"

    @classmethod
    def parse(cls, value) -> "Family":
        if isinstance(value, cls):
            return value
        aliases = {"thermal": cls.THERMAL, "thermal_split": cls.THERMAL, "spdc": cls.SPDC,
                   "entangled": cls.SPDC}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise DomainError(f"unknown source family {value!r}") from None


@dataclass(frozen=True)
class SourceSpec:
    """Source family plus imaging parameters.

    ``M`` is the number of speckles per pixel, ``R`` the number of pixels the
    bucket integrates over.  The illumination ``I = M mu`` is derived.
    """

    family: Family
    mu: float
    M: int = 1
    R: int = 1

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        _check_mu(self.mu)
        if self.M < 1 or self.R < 1:
            raise DomainError(f"M and R must be >= 1, got M={self.M}, R={self.R}")

    @property
    def I(self) -> float:  # noqa: E743
        return self.M * self.mu

    @classmethod
    def from_illumination(cls, family, I: float, M: int, R: int = 1) -> "SourceSpec":
        return cls(family, I / M, M, R)


@dataclass(frozen=True)
class AreaPair:
    area1: float
    area2: float
    overlap: float

    def __post_init__(self):
        if not (self.area1 > 0 and self.area2 > 0):
            raise DomainError(f"areas must be positive, got {self.area1}, {self.area2}")
        if not (0 <= self.overlap <= min(self.area1, self.area2) * (1 + 1e-12)):
            raise DomainError(f"overlap {self.overlap} outside [0, min(area1, area2)]")


def _check_mu(mu):
    if not np.isfinite(mu) or mu < 0:
        raise DomainError(f"mu must be finite and >= 0, got {mu}")


def _cross_amplitude(family: Family, mu: float) -> tuple[float, float]:
    if family is Family.THERMAL:
        return 2.0 * mu, 2.0 * mu
    c = 2.0 * np.sqrt(mu * (mu + 1.0))
    return c, -c


def microscopic_pair(family, mu: float) -> TwoModeCovariance:
    """Covariance matrix of one pair of correlated speckle modes."""
    return coarse_grained(family, mu, 1)


def coarse_grained(family, mu: float, R: float) -> TwoModeCovariance:
    """Effective pixel/bucket covariance matrix; cross terms shrink as ``1/sqrt(R)``.

    The SPDC p-p entry carries the opposite sign of the q-q entry, as required
    for a physical two-mode squeezed state.
    """
    family = Family.parse(family)
    _check_mu(mu)
    if not R >= 1:
        raise DomainError(f"R must be >= 1, got {R}")
    c, d = _cross_amplitude(family, mu)
    scale = 1.0 / np.sqrt(R)
    return TwoModeCovariance(1.0 + 2.0 * mu, 1.0 + 2.0 * mu, c * scale, d * scale)


def overlap_factor(areas: AreaPair) -> float:
    """Cross-correlation scale between two detector areas, ``A_overlap / sqrt(A1 A2)``."""
    return min(areas.overlap / np.sqrt(areas.area1 * areas.area2), 1.0)


def apply_overlap(sigma: TwoModeCovariance, areas: AreaPair) -> TwoModeCovariance:
    """Scale the cross entries of a matched-area matrix by the overlap factor."""
    k = overlap_factor(areas)
    return TwoModeCovariance(sigma.a, sigma.b, sigma.c * k, sigma.d * k)


def normalization_factor(R: float) -> float:
    if not R >= 1:
        raise DomainError(f"R must be >= 1, got {R}")
    return float(np.sqrt(R / 2.0))


def normalized_correlations(sigma: TwoModeCovariance, R: float) -> CorrelationBreakdown:
    """Correlations of ``sigma`` rescaled by ``sqrt(R/2)``; the matrix itself is untouched."""
    return correlations(sigma).scaled(normalization_factor(R))


def source_correlations(spec: SourceSpec, coarse: bool = True, normalized: bool = True):
    """Correlations for a source spec, coarse-grained over ``spec.R`` and normalized by default."""
    if not coarse:
        return correlations(microscopic_pair(spec.family, spec.mu))
    sigma = coarse_grained(spec.family, spec.mu, spec.R)
    if normalized:
        return normalized_correlations(sigma, spec.R)
    return correlations(sigma)


def high_illumination_total(R: float) -> float:
    """Limit of the normalized total correlations as ``mu -> inf`` (both families)."""
    if not R > 1:
        raise DomainError(f"limit requires R > 1, got {R}")
    return float(np.sqrt(R / 2.0) * np.log(R / (R - 1.0)))
