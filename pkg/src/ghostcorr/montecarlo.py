"""Frame-by-frame Monte Carlo of lensed ghost imaging with a binary mask.

Each frame is one realization of every source mode.  Mode ``k`` of pixel
``j`` in the resolving arm is paired with exactly one mode in the bucket arm;
the bucket arm passes through the mask, so only modes of transmitting pixels
reach the bucket detector.  The bucket therefore integrates
``mask.n_in * M`` modes, and it is ``mask.n_in`` that plays the role of the
pixel count ``R`` in the analytic SNR.

Random streams are attached to fixed blocks of ``BLOCK_FRAMES`` frames and
derived from ``(seed, block_index)``, so an ensemble is bit-identical for any
worker count.
"""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, InsufficientDataError, NumericDegeneracyError
from .snr import snr_entangled, snr_thermal
from .sources import Family, SourceSpec

BLOCK_FRAMES = 1000
SCHEMA = "ghostcorr-frames/1"


@dataclass(frozen=True)
class MaskImage:
    """Binary transmission mask over the image pixels (True = transparent)."""

    pixels: tuple

    def __post_init__(self):
        px = tuple(bool(p) for p in self.pixels)
        object.__setattr__(self, "pixels", px)
        if not any(px) or all(px):
            raise DomainError(
                "mask needs at least one transparent and one opaque pixel; "
                "an all-transparent or all-opaque mask leaves the SNR undefined"
            )

    @property
    def array(self) -> np.ndarray:
        return np.array(self.pixels, dtype=bool)

    @property
    def n_pixels(self) -> int:
        return len(self.pixels)

    @property
    def n_in(self) -> int:
        return sum(self.pixels)

    @property
    def n_out(self) -> int:
        return self.n_pixels - self.n_in

    @classmethod
    def for_spec(cls, spec: SourceSpec) -> "MaskImage":
        """Half-covered image: ``spec.R`` transparent then ``spec.R`` opaque pixels."""
        return cls.split(spec.R, spec.R)

    @classmethod
    def split(cls, n_in: int, n_out: int | None = None) -> "MaskImage":
        """Mask with ``n_in`` transparent pixels followed by ``n_out`` opaque ones."""
        n_out = n_in if n_out is None else n_out
        return cls((True,) * n_in + (False,) * n_out)


@dataclass
class FrameEnsemble:
    spec: SourceSpec
    mask: MaskImage
    frames: int
    bucket_counts: np.ndarray  # (frames,)
    pixel_counts: np.ndarray  # (frames, n_pixels)
    rng_seed: int
    # integer per-mode sums per block: n1, n2, n1*n2, n1^2, n2^2, modes
    mode_sums: np.ndarray = field(repr=False, default=None)

    def to_csv(self, path) -> None:
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as fh:
            fh.write(f"# schema: {SCHEMA}\n")
            fh.write(f"# params: {json.dumps(_param_echo(self), sort_keys=True)}\n")
            w = csv.writer(fh)
            w.writerow(["frame", "bucket_count"] + [f"pixel_{j}" for j in range(self.mask.n_pixels)])
            for t in range(self.frames):
                w.writerow([t, int(self.bucket_counts[t])] + self.pixel_counts[t].tolist())


@dataclass(frozen=True)
class EmpiricalResult:
    snr_hat: float
    snr_stderr: float
    mode_cross_cov: float
    mode_cross_cov_stderr: float
    mode_mean: float
    mode_mean_stderr: float
    n_batches: int

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _param_echo(ens: FrameEnsemble) -> dict:
    return {
        "family": ens.spec.family.value,
        "mu": ens.spec.mu,
        "M": ens.spec.M,
        "mask": "".join("1" if p else "0" for p in ens.mask.pixels),
        "frames": ens.frames,
        "seed": ens.rng_seed,
        "block_frames": BLOCK_FRAMES,
    }


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def sample_modes(family: Family, mu: float, shape, rng: np.random.Generator):
    """Photon counts ``(n1, n2)`` of paired modes in the bucket and resolving arms.

    Thermal: a circular Gaussian amplitude with mean intensity ``2 mu`` is split
    in half and each arm gets conditionally independent Poisson counts.  SPDC:
    a Bose-Einstein count of mean ``mu`` is copied to both arms.
    """
    family = Family.parse(family)
    if mu == 0:
        z = np.zeros(shape, dtype=np.int64)
        return z, z.copy()
    if family is Family.THERMAL:
        intensity = rng.exponential(2.0 * mu, size=shape)
        half = intensity / 2.0
        return rng.poisson(half), rng.poisson(half)
    n = rng.geometric(1.0 / (1.0 + mu), size=shape) - 1
    return n, n.copy()


def sample_frame(spec: SourceSpec, mask: MaskImage, rng: np.random.Generator, frames: int = 1):
    """Draw ``frames`` frames.  Returns bucket totals, pixel counts and per-mode sums."""
    n1, n2 = sample_modes(spec.family, spec.mu, (frames, mask.n_pixels, spec.M), rng)
    bucket_pixels = n1.sum(axis=2) * mask.array  # mask acts on the bucket arm only
    pixel_counts = n2.sum(axis=2)
    sums = np.array(
        [n1.sum(), n2.sum(), (n1 * n2).sum(), (n1 * n1).sum(), (n2 * n2).sum(), n1.size],
        dtype=np.int64,
    )
    return bucket_pixels.sum(axis=1), pixel_counts, sums


def _run_block(job):
    spec, mask, seed, block, size = job
    return sample_frame(spec, mask, block_rng(seed, block), size)


def simulate(spec: SourceSpec, mask: MaskImage, frames: int, seed: int, threads: int = 1) -> FrameEnsemble:
    if frames < 2:
        raise InsufficientDataError(f"need at least 2 frames, got {frames}")
    if spec.R != mask.n_in:
        raise DomainError(
            f"spec.R={spec.R} must equal the number of transparent mask pixels ({mask.n_in})"
        )
    if not 0 <= seed < 2**64:
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed}")
    n_blocks = math.ceil(frames / BLOCK_FRAMES)
    jobs = [
        (spec, mask, seed, b, min(BLOCK_FRAMES, frames - b * BLOCK_FRAMES))
        for b in range(n_blocks)
    ]
    if threads > 1 and n_blocks > 1:
        # numpy's samplers hold the GIL, so workers are processes.
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_run_block, jobs, chunksize=max(1, n_blocks // (4 * threads))))
    else:
        parts = [_run_block(j) for j in jobs]
    return FrameEnsemble(
        spec=spec,
        mask=mask,
        frames=frames,
        bucket_counts=np.concatenate([p[0] for p in parts]),
        pixel_counts=np.concatenate([p[1] for p in parts]),
        rng_seed=seed,
        mode_sums=np.stack([p[2] for p in parts]),
    )


def imaging_function(ensemble: FrameEnsemble, pixel: int) -> float:
    """Unbiased sample covariance of the bucket total and the count of ``pixel``."""
    if ensemble.frames < 2:
        raise InsufficientDataError("imaging function needs at least 2 frames")
    b = ensemble.bucket_counts.astype(float)
    n = ensemble.pixel_counts[:, pixel].astype(float)
    return float(np.dot(b - b.mean(), n - n.mean()) / (len(b) - 1))


def _snr_statistic(bucket, pix_in, pix_out):
    """Single-frame SNR of ``dB (dN_in - dN_out)`` pooled over in/out pixels."""
    db = bucket - bucket.mean()
    dn_in = pix_in - pix_in.mean(axis=0)
    dn_out = pix_out - pix_out.mean(axis=0)
    frames = len(db)
    s_in = db @ dn_in / frames  # per-pixel imaging function
    s_out = db @ dn_out / frames
    mean_x = s_in.mean() - s_out.mean()
    db2 = db * db
    ex2 = np.mean(
        db2 * ((dn_in**2).mean(axis=1) - 2.0 * dn_in.mean(axis=1) * dn_out.mean(axis=1)
               + (dn_out**2).mean(axis=1))
    )
    var_x = ex2 - mean_x**2
    if not var_x > 0:
        raise NumericDegeneracyError("variance of S_in - S_out vanished; frames are degenerate")
    return abs(mean_x) / math.sqrt(var_x)


def _jackknife(values_loo):
    n = len(values_loo)
    loo = np.asarray(values_loo)
    return float(math.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2)))


def empirical_snr(ensemble: FrameEnsemble, n_batches: int = 20) -> EmpiricalResult:
    """Empirical SNR with a delete-one-batch jackknife standard error.

    ``S_in`` and ``S_out`` are averaged over all transparent and all opaque
    pixels; the variance is that of the single-frame product
    ``dB (dN_in - dN_out)``, matching the analytic per-frame SNR.
    """
    if n_batches < 20:
        raise DomainError("at least 20 batches are required for the standard error")
    if ensemble.frames < n_batches:
        raise InsufficientDataError(f"{ensemble.frames} frames < {n_batches} batches")
    mask = ensemble.mask.array
    b = ensemble.bucket_counts.astype(float)
    p = ensemble.pixel_counts.astype(float)
    pin, pout = p[:, mask], p[:, ~mask]
    if ensemble.spec.mu == 0:
        snr_hat, stderr = 0.0, 0.0
    else:
        snr_hat = _snr_statistic(b, pin, pout)
        edges = np.linspace(0, ensemble.frames, n_batches + 1).astype(int)
        loo = []
        for i in range(n_batches):
            keep = np.ones(ensemble.frames, dtype=bool)
            keep[edges[i]:edges[i + 1]] = False
            loo.append(_snr_statistic(b[keep], pin[keep], pout[keep]))
        stderr = _jackknife(loo)
    cov, cov_se, mean, mean_se = _mode_moments(ensemble.mode_sums, n_batches)
    return EmpiricalResult(snr_hat, stderr, cov, cov_se, mean, mean_se, n_batches)


def _mode_moments(mode_sums, n_batches):
    """Per-mode mean and cross covariance with batch-means standard errors."""
    sums = np.asarray(mode_sums, dtype=np.int64)
    groups = np.array_split(np.arange(len(sums)), min(n_batches, len(sums)))
    # Integer accumulation is exact, hence independent of reduction order.
    g = np.stack([sums[idx].sum(axis=0) for idx in groups]).astype(float)
    n = g[:, 5]
    m1, m2, m12 = g[:, 0] / n, g[:, 1] / n, g[:, 2] / n
    cov_b = m12 - m1 * m2
    tot = sums.sum(axis=0).astype(float)
    N = tot[5]
    cov = tot[2] / N - (tot[0] / N) * (tot[1] / N)
    mean = tot[1] / N
    k = len(groups)
    se = lambda x: float(np.std(x, ddof=1) / math.sqrt(k)) if k > 1 else float("nan")
    return float(cov), se(cov_b), float(mean), se(m2)


def analytic_snr(spec: SourceSpec, mask: MaskImage) -> float:
    """Analytic SNR for the simulated geometry (bucket integrates ``mask.n_in`` pixels)."""
    fn = snr_thermal if spec.family is Family.THERMAL else snr_entangled
    return fn(spec.mu, spec.M, mask.n_in)


def expected_mode_cross_cov(spec: SourceSpec) -> float:
    mu = spec.mu
    return mu * mu if spec.family is Family.THERMAL else mu * (mu + 1.0)


def summary(ensemble: FrameEnsemble, result: EmpiricalResult) -> dict:
    analytic = analytic_snr(ensemble.spec, ensemble.mask)
    z = (result.snr_hat - analytic) / result.snr_stderr if result.snr_stderr > 0 else 0.0
    return {
        "schema": "ghostcorr-mc-summary/1",
        "parameters": _param_echo(ensemble),
        "seed": ensemble.rng_seed,
        **result.to_dict(),
        "snr_analytic": analytic,
        "snr_z": z,
        "mode_cross_cov_expected": expected_mode_cross_cov(ensemble.spec),
    }


def consistency_check(ens: FrameEnsemble, result: EmpiricalResult, snr_sigmas=3.0, mode_sigmas=5.0) -> dict:
    out = summary(ens, result)
    snr_ok = abs(out["snr_z"]) <= snr_sigmas
    exp_cov = out["mode_cross_cov_expected"]
    if result.mode_cross_cov_stderr > 0:
        cov_ok = abs(result.mode_cross_cov - exp_cov) <= mode_sigmas * result.mode_cross_cov_stderr
        mean_ok = abs(result.mode_mean - ens.spec.mu) <= mode_sigmas * result.mode_mean_stderr
    else:
        cov_ok = result.mode_cross_cov == exp_cov
        mean_ok = result.mode_mean == ens.spec.mu
    snr_ok, cov_ok, mean_ok = bool(snr_ok), bool(cov_ok), bool(mean_ok)
    return {"snr": snr_ok, "mode_cross_cov": cov_ok, "mode_mean": mean_ok,
            "passed": bool(snr_ok and cov_ok and mean_ok)}
