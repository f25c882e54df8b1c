"""Analytic signal-to-noise ratios of covariance-based ghost imaging."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .sources import Family, SourceSpec, high_illumination_total


def _check(mu, M, R):
    mu = np.asarray(mu, dtype=float)
    if np.any(~np.isfinite(mu)) or np.any(mu < 0):
        raise DomainError(f"mu must be finite and >= 0, got {mu}")
    if np.any(np.asarray(M) < 1) or np.any(np.asarray(R) < 1):
        raise DomainError(f"M and R must be >= 1, got M={M}, R={R}")
    return mu


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def snr_thermal(mu, M, R):
    """SNR for a split thermal source with ``M`` speckles per pixel and ``R`` bucket pixels."""
    mu = _check(mu, M, R)
    num = mu * np.sqrt(M)
    den = mu**2 * (2 * M * R + M + 6) + 4 * mu * (M * R + 1) + 2 * M * R + 1
    return _out(num / np.sqrt(den))


def snr_entangled(mu, M, R):
    """SNR for a down-conversion (two-mode squeezed) source."""
    mu = _check(mu, M, R)
    num = np.sqrt(mu * (mu + 1) * M)
    k = 2 * M * R + M + 6
    den = mu**2 * k + mu * k + 1
    return _out(num / np.sqrt(den))


def snr_limit(M, R) -> float:
    """Common high-illumination SNR ``sqrt(M / (6 + M (2R + 1)))``."""
    _check(0.0, M, R)
    return float(np.sqrt(M / (6 + M * (2 * R + 1))))


def ratio_limit(R) -> float:
    """SNR over normalized total correlations as ``mu -> inf`` and ``M -> inf``."""
    if not R >= 2:
        raise DomainError(f"ratio_limit requires R >= 2, got {R}")
    return float(np.sqrt(1.0 / (2 * R + 1)) / high_illumination_total(R))


def finite_m_ratio_limit(M, R) -> float:
    """Same ratio as ``mu -> inf`` but keeping ``M`` finite."""
    return snr_limit(M, R) / high_illumination_total(R)


@dataclass(frozen=True)
class SnrPoint:
    snr: float
    spec: SourceSpec


def snr(spec: SourceSpec) -> SnrPoint:
    fn = snr_thermal if spec.family is Family.THERMAL else snr_entangled
    return SnrPoint(fn(spec.mu, spec.M, spec.R), spec)
