"""Entropic correlation measures of two-mode Gaussian states in standard form.

Covariance matrices use the unit-vacuum convention (vacuum = identity) with
quadrature ordering (q1, p1, q2, p2).  All entropies are in nats.  The
conditional state after a Gaussian measurement is always taken on mode 1
with the measurement acting on mode 2.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize

from .errors import DomainError, InconsistentStateError, NumericDegeneracyError

PHYS_TOL = 1e-12
ZERO_CORR_TOL = 1e-14


def entropy_f(x):
    """Von Neumann entropy of a single-mode thermal state with symplectic eigenvalue ``x``.

    ``f(x) = (x+1)/2 ln((x+1)/2) - (x-1)/2 ln((x-1)/2)``.  Accepts scalars or
    arrays; values in ``[1 - 1e-12, 1)`` are clamped to 1.
    """
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 1.0 - PHYS_TOL):
        raise DomainError(f"entropy_f requires x >= 1, got {x!r}")
    x = np.maximum(x, 1.0)
    hp = (x + 1.0) / 2.0
    hm = (x - 1.0) / 2.0
    # hp ln hp - hm ln hm rewritten to avoid subtracting two ~x ln x terms
    with np.errstate(divide="ignore"):
        tail = np.where(hm > 0, hm * np.log1p(1.0 / np.where(hm > 0, hm, 1.0)), 0.0)
    out = np.log(hp) + tail
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class TwoModeCovariance:
    """Standard-form two-mode covariance matrix.

    ``a`` and ``b`` are the local variances of modes 1 and 2, ``c`` the q-q and
    ``d`` the p-p cross covariance.  Construction fails for matrices that are
    not positive definite or violate the uncertainty relation.
    """

    a: float
    b: float
    c: float = 0.0
    d: float = 0.0

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, float(v))
        if self.a < 1.0 - PHYS_TOL or self.b < 1.0 - PHYS_TOL:
            raise DomainError(f"local variances must be >= 1, got a={self.a}, b={self.b}")
        if self.a * self.b - self.c**2 <= 0.0 or self.a * self.b - self.d**2 <= 0.0:
            raise DomainError(f"covariance not positive definite: {self}")
        nu_minus = _nu_pair(self.a, self.b, self.c, self.d)[1]
        if nu_minus < 1.0 - self.phys_tol:
            raise DomainError(f"unphysical covariance (nu_minus={nu_minus:.15g} < 1): {self}")

    @property
    def phys_tol(self) -> float:
        # ab - c^2 cancels catastrophically for nearly pure states at large a.
        return max(PHYS_TOL, 8.0 * np.finfo(float).eps * self.a * self.b)

    @property
    def det(self) -> float:
        return (self.a * self.b - self.c**2) * (self.a * self.b - self.d**2)

    @property
    def uncorrelated(self) -> bool:
        return abs(self.c) < ZERO_CORR_TOL and abs(self.d) < ZERO_CORR_TOL

    def matrix(self) -> np.ndarray:
        a, b, c, d = self.a, self.b, self.c, self.d
        return np.array(
            [[a, 0, c, 0], [0, a, 0, d], [c, 0, b, 0], [0, d, 0, b]], dtype=float
        )

    def blocks(self):
        """Return the local blocks ``(A, B)`` and the cross block ``C``."""
        return (
            np.diag([self.a, self.a]),
            np.diag([self.b, self.b]),
            np.diag([self.c, self.d]),
        )

    @classmethod
    def vacuum(cls) -> "TwoModeCovariance":
        return cls(1.0, 1.0, 0.0, 0.0)


@dataclass(frozen=True)
class SymplecticSpectrum:
    nu_plus: float
    nu_minus: float
    nu_tilde_minus: float


@dataclass(frozen=True)
class CorrelationBreakdown:
    quantum: float
    classical: float
    total: float
    entangled: bool
    cond_det: float

    def scaled(self, factor: float) -> "CorrelationBreakdown":
        return CorrelationBreakdown(
            self.quantum * factor,
            self.classical * factor,
            self.total * factor,
            self.entangled,
            self.cond_det,
        )


def _nu_pair(a, b, c, d):
    # nu^2 = (Delta +- sqrt(Delta^2 - 4 det)) / 2 with Delta = a^2 + b^2 + 2cd.
    # The discriminant is expanded as (a^2 - b^2)^2 + 4 (ac + bd)(ad + bc) so
    # that it stays exact when nu_plus = nu_minus (symmetric squeezed states).
    delta = a * a + b * b + 2.0 * c * d
    det = (a * b - c * c) * (a * b - d * d)
    disc = (a * a - b * b) ** 2 + 4.0 * (a * c + b * d) * (a * d + b * c)
    if disc < 0.0:
        if disc < -1e-12 * delta * delta:
            raise NumericDegeneracyError(
                f"negative symplectic discriminant {disc:.3e} (Delta={delta}, det={det})"
            )
        disc = 0.0
    root = np.sqrt(disc)
    nu_p2 = (delta + root) / 2.0
    # Product form avoids cancellation for the smaller root.
    nu_m2 = det / nu_p2 if nu_p2 > 0 else 0.0
    return float(np.sqrt(nu_p2)), float(np.sqrt(max(nu_m2, 0.0)))


def symplectic_spectrum(sigma: TwoModeCovariance) -> SymplecticSpectrum:
    """Symplectic eigenvalues of ``sigma`` and the smaller one of its partial transpose."""
    nu_p, nu_m = _nu_pair(sigma.a, sigma.b, sigma.c, sigma.d)
    _, nu_t = _nu_pair(sigma.a, sigma.b, sigma.c, -sigma.d)
    return SymplecticSpectrum(nu_p, nu_m, nu_t)


def mutual_information(sigma: TwoModeCovariance, entropy: Callable = entropy_f) -> float:
    """Total correlations ``f(a) + f(b) - f(nu+) - f(nu-)``."""
    if sigma.uncorrelated:
        return 0.0
    sp = symplectic_spectrum(sigma)
    return (
        entropy(sigma.a) + entropy(sigma.b)
        - entropy(sp.nu_plus) - entropy(max(sp.nu_minus, 1.0))
    )


def optimal_conditional_determinant(sigma: TwoModeCovariance) -> float:
    """Minimum over Gaussian measurements on mode 2 of the conditional determinant of mode 1.

    Closed form in the local symplectic invariants ``I1 = a^2``, ``I2 = b^2``,
    ``I3 = cd`` and ``I4 = det(sigma)``.  The first branch is generated by
    heterodyne-like measurements, the second by homodyne-like ones.
    """
    if sigma.uncorrelated:
        return sigma.a**2
    i1, i2, i3, i4 = sigma.a**2, sigma.b**2, sigma.c * sigma.d, sigma.det
    if i2 - 1.0 <= PHYS_TOL:
        raise InconsistentStateError(
            f"mode 2 is pure (b={sigma.b}) yet correlated (c={sigma.c}, d={sigma.d})"
        )
    if (i4 - i1 * i2) ** 2 <= (1.0 + i2) * i3**2 * (i1 + i4):
        inner = i3**2 + (i2 - 1.0) * (i4 - i1)
        value = (
            2.0 * i3**2 + (i2 - 1.0) * (i4 - i1) + 2.0 * abs(i3) * np.sqrt(max(inner, 0.0))
        ) / (i2 - 1.0) ** 2
    else:
        # (s - sqrt(s^2 - 4 I1 I2 I4)) / (2 I2) with s = I1 I2 - I3^2 + I4; in
        # standard form s^2 - 4 I1 I2 I4 = a^2 b^2 (c^2 - d^2)^2, which gives
        # the cancellation-free homodyne value below.
        value = sigma.a * (sigma.a - max(sigma.c**2, sigma.d**2) / sigma.b)
    return float(max(value, 1.0))


def _measurement_cov(log_lam, phi):
    lam = np.exp(log_lam)
    cs, sn = np.cos(phi), np.sin(phi)
    # R(phi) diag(lam, 1/lam) R(phi)^T
    m00 = lam * cs**2 + sn**2 / lam
    m11 = lam * sn**2 + cs**2 / lam
    m01 = (lam - 1.0 / lam) * cs * sn
    return m00, m01, m11


def _cond_det(sigma, log_lam, phi):
    a, b, c, d = sigma.a, sigma.b, sigma.c, sigma.d
    m00, m01, m11 = _measurement_cov(log_lam, phi)
    s00, s01, s11 = b + m00, m01, b + m11
    det_s = s00 * s11 - s01 * s01
    # eps = A - C (B + sigma_m)^-1 C^T, C = diag(c, d)
    e00 = a - c * c * s11 / det_s
    e11 = a - d * d * s00 / det_s
    e01 = c * d * s01 / det_s
    return e00 * e11 - e01 * e01


def measurement_oracle(sigma: TwoModeCovariance, grid_density: int = 200) -> float:
    """Brute-force minimum of the conditional determinant.

    Scans pure single-mode Gaussian measurements ``R(phi) diag(lam, 1/lam) R(phi)^T``
    on a log grid ``lam in [1e-3, 1e3]`` times ``phi in [0, pi)``, then polishes
    the best few grid points with Nelder-Mead in ``(ln lam, phi)``, letting
    ``lam`` run to the homodyne limits.
    """
    log_lam = np.linspace(np.log(1e-3), np.log(1e3), grid_density)
    phi = np.linspace(0.0, np.pi, grid_density, endpoint=False)
    L, P = np.meshgrid(log_lam, phi, indexing="ij")
    vals = _cond_det(sigma, L, P)
    order = np.argsort(vals, axis=None)[:5]
    best = float(vals.flat[order[0]])

    def obj(x):
        ll = np.clip(x[0], -40.0, 40.0)
        return float(_cond_det(sigma, ll, x[1]))

    for flat in order:
        x0 = np.array([L.flat[flat], P.flat[flat]])
        res = optimize.minimize(
            obj, x0, method="Nelder-Mead",
            options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000},
        )
        best = min(best, float(res.fun))
    return best


def correlations(
    sigma: TwoModeCovariance,
    entropy: Callable = entropy_f,
    cond_det: Callable[[TwoModeCovariance], float] = optimal_conditional_determinant,
) -> CorrelationBreakdown:
    """Quantum discord, classical correlations and mutual information of ``sigma``."""
    sp = symplectic_spectrum(sigma)
    entangled = sp.nu_tilde_minus < 1.0 - PHYS_TOL
    if sigma.uncorrelated:
        return CorrelationBreakdown(0.0, 0.0, 0.0, entangled, sigma.a**2)
    det_eps = cond_det(sigma)
    f_eps = entropy(np.sqrt(det_eps))
    classical = entropy(sigma.a) - f_eps
    quantum = entropy(sigma.b) - entropy(sp.nu_plus) - entropy(max(sp.nu_minus, 1.0)) + f_eps
    return CorrelationBreakdown(
        quantum=quantum,
        classical=classical,
        total=quantum + classical,
        entangled=entangled,
        cond_det=det_eps,
    )
