"""Paraxial free-space propagation from an incoherent disk source.

Source-plane plane-wave modes ``a(kappa)`` are propagated over a distance
``z`` to a square detector grid.  With ``beta = k0 / 2z`` the Green's function

    g(rho; kappa) = (-i k0 e^{i k0 z} / 2 pi z)
                    * int_disk d rho_s exp(i beta |rho - rho_s|^2 - i kappa . rho_s)

factorises into a quadratic phase in ``rho`` times the aperture spectrum
``F(q) = int_disk exp(i beta rho_s^2 - i q . rho_s)`` evaluated at
``q = k0 rho / z + kappa``.  Two evaluation routes exist:

* ``greens_function``: radial Gauss-Legendre quadrature of the Bessel-reduced
  integral, for arbitrary points;
* ``aperture_spectrum`` / ``greens_grid``: one FFT of the chirped disk on a
  source grid whose reciprocal spacing equals the detector spacing mapped to
  ``q``.  The kappa grid shares that spacing, so every mode is an index shift.

Field operators use continuum mode normalization: with mode spacing ``dq`` the
discrete operators carry a weight ``dq / 2 pi`` and
``[E(rho), E^dagger(rho')] -> delta(rho - rho')`` for a large source.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import j0

from .errors import DomainError, ResolutionError
from .gaussian_core import TwoModeCovariance
from .sources import Family

PARAXIAL_WARN = 0.1


@dataclass(frozen=True)
class PropagationSetup:
    """Geometry and discretization.  Lengths in metres.

    The kappa (mode) grid has ``source_points**2`` modes with spacing
    ``k0 * detector_spacing / z``; the source integration grid has spacing
    ``wavelength * z / (source_points * detector_spacing)``.
    """

    wavelength: float = 800e-9
    z: float = 0.5
    source_radius: float = 10e-3
    detector_points: int = 256
    detector_spacing: float = 16e-6
    source_points: int = 2048

    def __post_init__(self):
        if not self.z > 0:
            raise DomainError(f"propagation distance must be positive, got {self.z}")
        if not (self.wavelength > 0 and self.source_radius > 0 and self.detector_spacing > 0):
            raise DomainError("wavelength, source_radius and detector_spacing must be positive")
        if self.detector_points < 2 or self.source_points < 2:
            raise DomainError("grids need at least 2 points per side")
        # The aperture spectrum is periodic in q with period source_points * dq;
        # its support (radius ~ k0 a / z) must fit, which is also the chirp Nyquist limit.
        if self.source_points * self.detector_spacing < 2.05 * self.source_radius:
            raise ResolutionError(
                f"source grid aliases: source_points*detector_spacing="
                f"{self.source_points * self.detector_spacing:.4g} m < 2.05*source_radius"
            )
        if self.paraxial_ratio > PARAXIAL_WARN:
            warnings.warn(
                f"source_radius/z = {self.paraxial_ratio:.3g} exceeds {PARAXIAL_WARN}; "
                "paraxial approximation is doubtful",
                stacklevel=2,
            )

    @property
    def k0(self) -> float:
        return 2.0 * np.pi / self.wavelength

    @property
    def paraxial_ratio(self) -> float:
        return self.source_radius / self.z

    @property
    def source_spacing(self) -> float:
        return self.wavelength * self.z / (self.source_points * self.detector_spacing)

    @property
    def mode_spacing(self) -> float:
        return self.k0 * self.detector_spacing / self.z

    @property
    def mode_count(self) -> int:
        return self.source_points**2

    @property
    def prefactor(self) -> complex:
        return -1j * self.k0 * np.exp(1j * self.k0 * self.z) / (2.0 * np.pi * self.z)

    @property
    def coherence_radius(self) -> float:
        """First zero of the far-field coherence function of the disk, ``3.8317 z / (k0 a)``."""
        return 3.8317059702075125 * self.z / (self.k0 * self.source_radius)

    def detector_axis(self) -> np.ndarray:
        n = np.arange(self.detector_points) - self.detector_points // 2
        return n * self.detector_spacing

    def detector_coords(self) -> np.ndarray:
        x = self.detector_axis()
        X, Y = np.meshgrid(x, x, indexing="ij")
        return np.stack([X.ravel(), Y.ravel()], axis=1)

    def kappa_of_index(self, index) -> np.ndarray:
        return np.asarray(index, dtype=float) * self.mode_spacing

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(
            k0=self.k0,
            source_spacing=self.source_spacing,
            mode_spacing=self.mode_spacing,
            mode_count=self.mode_count,
            paraxial_ratio=self.paraxial_ratio,
            coherence_radius=self.coherence_radius,
        )
        return d


def greens_function(setup: PropagationSetup, rho, kappa, nodes: int | None = None):
    """Green's function by direct radial quadrature.

    ``rho`` and ``kappa`` are arrays of shape ``(..., 2)`` (broadcast against
    each other).  The angular integral is done exactly (Bessel ``J0``), the
    radial one with Gauss-Legendre nodes on ``[0, a]``.
    """
    rho = np.asarray(rho, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    beta = setup.k0 / (2.0 * setup.z)
    q = setup.k0 * rho / setup.z + kappa
    qn = np.linalg.norm(q, axis=-1)
    a = setup.source_radius
    if nodes is None:
        # enough nodes for the chirp and Bessel oscillations across [0, a]
        phase_span = beta * a * a + float(np.max(qn, initial=0.0)) * a
        nodes = int(max(256, 6 * phase_span / np.pi))
    r, w = _composite_legendre(a, nodes)
    radial = (w * r * np.exp(1j * beta * r * r)) * j0(qn[..., None] * r)
    F = 2.0 * np.pi * radial.sum(axis=-1)
    r2 = np.sum(rho * rho, axis=-1)
    return setup.prefactor * np.exp(1j * beta * r2) * F


_GL16 = np.polynomial.legendre.leggauss(16)


def _composite_legendre(a: float, nodes: int):
    panels = max(1, -(-nodes // 16))
    edges = np.linspace(0.0, a, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    r = (mid[:, None] + half[:, None] * _GL16[0][None, :]).ravel()
    w = (half[:, None] * _GL16[1][None, :]).ravel()
    return r, w


def _disk_coverage(setup: PropagationSetup, sub: int = 8) -> np.ndarray:
    ns, ds, a = setup.source_points, setup.source_spacing, setup.source_radius
    s = (np.arange(ns) - ns // 2) * ds
    X, Y = np.meshgrid(s, s, indexing="ij")
    r = np.hypot(X, Y)
    cov = (r <= a).astype(float)
    edge = np.abs(r - a) < ds
    # supersample the boundary cells
    off = (np.arange(sub) + 0.5) / sub - 0.5
    ox, oy = np.meshgrid(off * ds, off * ds, indexing="ij")
    ex, ey = X[edge][:, None], Y[edge][:, None]
    inside = (ex + ox.ravel()) ** 2 + (ey + oy.ravel()) ** 2 <= a * a
    cov[edge] = inside.mean(axis=1)
    return cov


@lru_cache(maxsize=4)
def aperture_spectrum(setup: PropagationSetup) -> np.ndarray:
    """``F[l]`` on the centred q-grid ``q_l = l * dq`` (shape ``source_points**2``)."""
    ns, ds = setup.source_points, setup.source_spacing
    s = (np.arange(ns) - ns // 2) * ds
    X, Y = np.meshgrid(s, s, indexing="ij")
    beta = setup.k0 / (2.0 * setup.z)
    f = _disk_coverage(setup) * np.exp(1j * beta * (X * X + Y * Y)) * ds * ds
    F = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(f)))
    F.setflags(write=False)
    return F


def greens_grid(setup: PropagationSetup, kappa_index) -> np.ndarray:
    """Green's function on the full detector grid for integer mode indices ``(mx, my)``.

    Returns an array of shape ``(len(kappa_index), N, N)``.
    """
    F = aperture_spectrum(setup)
    ns, nd = setup.source_points, setup.detector_points
    kidx = np.atleast_2d(np.asarray(kappa_index, dtype=int))
    n = np.arange(nd) - nd // 2
    rho = n * setup.detector_spacing
    beta = setup.k0 / (2.0 * setup.z)
    phase = np.exp(1j * beta * (rho[:, None] ** 2 + rho[None, :] ** 2))
    out = np.empty((len(kidx), nd, nd), dtype=complex)
    for i, (mx, my) in enumerate(kidx):
        ix = (n + mx + ns // 2) % ns
        iy = (n + my + ns // 2) % ns
        out[i] = setup.prefactor * phase * F[np.ix_(ix, iy)]
    return out


def crosscheck_paths(setup: PropagationSetup, samples: int = 12, seed: int = 0) -> float:
    """Largest quadrature-vs-FFT discrepancy relative to ``max |g|`` over random samples."""
    rng = np.random.default_rng(seed)
    nd = setup.detector_points
    support = int(setup.source_radius / setup.detector_spacing * 0.8)
    F = aperture_spectrum(setup)
    peak = np.abs(setup.prefactor) * np.abs(F).max()
    worst = 0.0
    for _ in range(samples):
        n = rng.integers(-nd // 2, nd - nd // 2, size=2)
        m = rng.integers(-support, support + 1, size=2) - n
        fast = greens_grid(setup, [m])[0][n[0] + nd // 2, n[1] + nd // 2]
        ref = greens_function(setup, n * setup.detector_spacing, setup.kappa_of_index(m))
        worst = max(worst, abs(fast - ref) / peak)
    return float(worst)


@lru_cache(maxsize=4)
def _mode_kernel(setup: PropagationSetup) -> np.ndarray:
    """``K[d] = (dq/2pi)^2 |C|^2 sum_kappa conj(F[m]) F[m + d]`` over the whole mode grid.

    Indexed by ``d + (N - 1)`` for detector offsets ``|d| < N`` along each axis.
    """
    F = aperture_spectrum(setup)
    ns, nd = setup.source_points, setup.detector_points
    auto = np.fft.ifft2(np.abs(np.fft.fft2(F)) ** 2)
    w = (setup.mode_spacing / (2.0 * np.pi)) ** 2 * abs(setup.prefactor) ** 2
    d = np.arange(-nd + 1, nd) % ns
    K = w * auto[np.ix_(d, d)]
    K.setflags(write=False)
    return K


def correlation_profile(setup: PropagationSetup) -> tuple[np.ndarray, np.ndarray]:
    """``|<E^dagger(0) E(x e_x)>| / <E^dagger(0) E(0)>`` for ``x`` along the grid axis.

    Read off the mode kernel, so it works for grids too large for a dense matrix.
    """
    K = _mode_kernel(setup)
    nd = setup.detector_points
    row = np.abs(K[nd - 1:, nd - 1]) / np.real(K[nd - 1, nd - 1])
    return np.arange(nd) * setup.detector_spacing, row


@dataclass
class FieldGrid:
    """``<E^dagger(rho_i) E(rho_j)>`` on the flattened detector grid (photons per unit area)."""

    matrix: np.ndarray
    coords: np.ndarray
    setup: PropagationSetup
    mean_photons: float
    method: str

    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.matrix))

    def hermiticity_error(self) -> float:
        m = self.matrix
        return float(np.max(np.abs(m - m.conj().T)) / np.max(np.abs(np.diag(m))))

    def profile(self) -> tuple[np.ndarray, np.ndarray]:
        """Normalized ``|G(centre, centre + x e_x)|`` along +x from the grid centre."""
        nd = self.setup.detector_points
        centre = (nd // 2) * nd + nd // 2
        idx = centre + np.arange(0, nd - nd // 2) * nd
        row = np.abs(self.matrix[centre, idx]) / np.real(self.matrix[centre, centre])
        return np.arange(len(idx)) * self.setup.detector_spacing, row

    def correlation_width(self) -> float:
        """Half width at half maximum of the normalized correlation profile."""
        x, p = self.profile()
        below = np.nonzero(p < 0.5)[0]
        if len(below) == 0:
            raise ResolutionError("correlation profile never drops below 1/2 on this grid")
        k = below[0]
        return float(x[k - 1] + (p[k - 1] - 0.5) / (p[k - 1] - p[k]) * (x[k] - x[k - 1]))

    def to_csv(self, path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            fh.write("# schema: ghostcorr-fieldgrid/1\n")
            for row in self.matrix:
                fh.write(",".join(f"{v.real:.17g}{v.imag:+.17g}j" for v in row) + "\n")

    def metadata(self) -> dict:
        return {
            "schema": "ghostcorr-fieldgrid-meta/1",
            "setup": self.setup.to_dict(),
            "mean_photons": self.mean_photons,
            "method": self.method,
            "points": int(len(self.coords)),
            "grid_spacing": self.setup.detector_spacing,
            "mode_spacing": self.setup.mode_spacing,
        }

    def to_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.metadata(), indent=2, sort_keys=True), encoding="utf-8")


MAX_DIRECT_POINTS = 4096


def _check_delta_regime(setup: PropagationSetup, n_modes: int):
    points = setup.detector_points**2
    if n_modes < 10 * points:
        raise ResolutionError(f"{n_modes} modes < 10 x {points} detector points")


def field_correlations(setup: PropagationSetup, mean_photons_per_mode: float, method: str = "kernel") -> FieldGrid:
    """Detector-plane field correlation matrix for independent modes of equal occupation.

    ``method='modes'`` sums ``conj(g_i) g_j`` explicitly over every mode of the
    grid; ``method='kernel'`` performs the same sum in Fourier space.
    """
    if mean_photons_per_mode < 0:
        raise DomainError(f"mean photon number must be >= 0, got {mean_photons_per_mode}")
    nd = setup.detector_points
    if nd * nd > MAX_DIRECT_POINTS:
        raise ResolutionError(f"{nd}x{nd} grid too large for a dense correlation matrix")
    n = np.arange(nd) - nd // 2
    coords = setup.detector_coords()
    beta = setup.k0 / (2.0 * setup.z)
    phase = np.exp(1j * beta * np.sum(coords**2, axis=1))
    if method == "kernel":
        _check_delta_regime(setup, setup.mode_count)
        K = _mode_kernel(setup)
        ix = np.repeat(n, nd)
        iy = np.tile(n, nd)
        dx = ix[None, :] - ix[:, None] + nd - 1
        dy = iy[None, :] - iy[:, None] + nd - 1
        G = mean_photons_per_mode * np.conj(phase)[:, None] * phase[None, :] * K[dx, dy]
    elif method == "modes":
        F = aperture_spectrum(setup)
        ns = setup.source_points
        _check_delta_regime(setup, setup.mode_count)
        m = np.arange(ns) - ns // 2
        MX, MY = np.meshgrid(m, m, indexing="ij")
        MX, MY = MX.ravel(), MY.ravel()
        ix = np.repeat(n, nd)
        iy = np.tile(n, nd)
        w = (setup.mode_spacing / (2.0 * np.pi)) ** 2
        G = np.zeros((nd * nd, nd * nd), dtype=complex)
        for start in range(0, len(MX), 4096):
            sl = slice(start, start + 4096)
            g = F[(ix[:, None] + MX[None, sl] + ns // 2) % ns,
                  (iy[:, None] + MY[None, sl] + ns // 2) % ns]
            g = setup.prefactor * phase[:, None] * g
            G += g.conj() @ g.T
        G *= mean_photons_per_mode * w
    else:
        raise DomainError(f"unknown method {method!r}")
    return FieldGrid(G, coords, setup, float(mean_photons_per_mode), method)


def square_region(setup: PropagationSetup, area: float) -> np.ndarray:
    """Boolean mask of a centred square of the given area on the detector grid."""
    nd = setup.detector_points
    side = int(round(np.sqrt(area) / setup.detector_spacing))
    if side < 4:
        raise ResolutionError(f"area {area:.3g} m^2 spans {side} cells per side (< 4)")
    if side > nd:
        raise ResolutionError(f"area {area:.3g} m^2 exceeds the {nd}x{nd} detector grid")
    mask = np.zeros((nd, nd), dtype=bool)
    lo = nd // 2 - side // 2
    mask[lo:lo + side, lo:lo + side] = True
    return mask


def area_correlation(setup: PropagationSetup, region_a: np.ndarray, region_b: np.ndarray,
                     mean_photons: float = 1.0) -> complex:
    """``<E_a^dagger E_b>`` for area-averaged operators ``E_A = A^{-1/2} int_A E``.

    With ``mean_photons = 1`` this is also the commutator ``<[E_b, E_a^dagger]>``.
    """
    K = _mode_kernel(setup)
    x = setup.detector_axis()
    beta = setup.k0 / (2.0 * setup.z)
    phase = np.exp(1j * beta * (x[:, None] ** 2 + x[None, :] ** 2))
    ua = region_a * phase
    ub = region_b * phase
    # sum_{n in a, n' in b} conj(ua[n]) ub[n'] K[n' - n]
    conv = fftconvolve(ub, K[::-1, ::-1], mode="same")
    dA = setup.detector_spacing**2
    area_a, area_b = region_a.sum() * dA, region_b.sum() * dA
    return complex(mean_photons * np.vdot(ua, conv) * dA * dA / np.sqrt(area_a * area_b))


def commutator(setup: PropagationSetup, region: np.ndarray) -> float:
    """``<[E_A, E_A^dagger]>`` of an area-averaged operator; 1 in the large-source limit."""
    return float(np.real(area_correlation(setup, region, region, 1.0)))


def bucket_pixel_cross(setup: PropagationSetup, pixel_area: float, bucket_area: float) -> float:
    """Cross-correlation of a pixel and a concentric bucket, relative to the matched-area value.

    Returns ``|<E_b^dagger E_p>| / <E_p^dagger E_p>``, which approaches
    ``sqrt(A_p / A_b)`` when the coherence area is small against the pixel.
    """
    if not 0 < pixel_area <= bucket_area:
        raise DomainError(f"need 0 < pixel_area <= bucket_area, got {pixel_area}, {bucket_area}")
    p = square_region(setup, pixel_area)
    b = square_region(setup, bucket_area)
    if np.any(p & ~b):
        raise ResolutionError("pixel region not contained in bucket region after discretization")
    matched = area_correlation(setup, p, p)
    cross = area_correlation(setup, b, p)
    return float(abs(cross) / abs(matched))


def realized_area_ratio(setup: PropagationSetup, pixel_area: float, bucket_area: float) -> float:
    """``sqrt(A_p / A_b)`` for the areas as discretized on the grid."""
    p = square_region(setup, pixel_area)
    b = square_region(setup, bucket_area)
    return float(np.sqrt(p.sum() / b.sum()))


def effective_covariance(setup: PropagationSetup, family, mu: float,
                         pixel_area: float, bucket_area: float) -> TwoModeCovariance:
    """Pixel/bucket two-mode matrix with cross entries scaled by the lensless cross factor."""
    family = Family.parse(family)
    k = bucket_pixel_cross(setup, pixel_area, bucket_area)
    if family is Family.THERMAL:
        c = d = 2.0 * mu * k
    else:
        c = 2.0 * np.sqrt(mu * (mu + 1.0)) * k
        d = -c
    return TwoModeCovariance(1.0 + 2.0 * mu, 1.0 + 2.0 * mu, c, d)
