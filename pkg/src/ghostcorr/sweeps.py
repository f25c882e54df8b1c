"""Parameter sweeps that emit figure data as CSV.

Rows are always written in grid order, whatever the worker count.
"""
from __future__ import annotations

import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .errors import DomainError
from .gaussian_core import correlations
from .snr import snr_entangled, snr_thermal
from .sources import Family, coarse_grained, microscopic_pair, normalized_correlations

SCHEMA_VERSION = 1
FIGURES = ("fig3", "fig4", "fig5")


def expand_range(spec) -> list[float]:
    """Turn ``[x, ...]`` or ``{"log": [lo, hi, n]}`` / ``{"lin": [...]}`` into a list.

    ``lo`` and ``hi`` of a log spec are the values themselves, not exponents.
    """
    if isinstance(spec, dict):
        if "log" in spec:
            lo, hi, n = spec["log"]
            if lo <= 0 or hi <= 0:
                raise DomainError(f"log range needs positive bounds, got {spec}")
            vals = np.geomspace(lo, hi, int(n)).tolist()
        elif "lin" in spec:
            lo, hi, n = spec["lin"]
            vals = np.linspace(lo, hi, int(n)).tolist()
        else:
            raise DomainError(f"unknown range spec {spec}")
    elif np.isscalar(spec):
        vals = [float(spec)]
    else:
        vals = [float(v) for v in spec]
    if not vals:
        raise DomainError("ranges must be non-empty")
    return vals


_DEFAULTS = {
    "fig3": dict(family="thermal_split", I=[0.0, 0.01, 0.03, 0.1, 0.3, 0.5, 1.0, 2.0, 3.0, 5.0,
                                             10.0, 20.0, 30.0, 50.0, 100.0],
                 M=[1, 2, 5, 10], R=[1], normalized=False),
    "fig4": dict(family="thermal_split", I={"log": [1e-3, 1000.0, 40]}, M=[1, 10, 100, 1000],
                 R=[100], normalized=True),
    "fig5": dict(family="spdc", I=[0.0] + np.geomspace(1e-3, 1000.0, 60).tolist(), M=[1],
                 R=[100], normalized=True),
}


@dataclass
class SweepConfig:
    family: str = "thermal_split"
    I: object = field(default_factory=lambda: [1.0])
    M: object = field(default_factory=lambda: [1])
    R: object = field(default_factory=lambda: [100])
    normalized: bool = True
    out: str | None = None
    rng_seed: int = 0
    threads: int = 1

    def __post_init__(self):
        Family.parse(self.family)
        I, M, R = self.grid()
        if min(I) < 0:
            raise DomainError("illumination I must be >= 0")
        if min(M) < 1 or min(R) < 1:
            raise DomainError("M and R must be >= 1")

    def grid(self):
        return expand_range(self.I), [int(m) for m in expand_range(self.M)], expand_range(self.R)

    @classmethod
    def for_figure(cls, figure: str, overrides: dict | None = None) -> "SweepConfig":
        if figure not in FIGURES:
            raise DomainError(f"unknown figure {figure!r}; choose from {FIGURES}")
        base = dict(_DEFAULTS[figure])
        known = {f.name for f in fields(cls)}
        for k, v in (overrides or {}).items():
            if k not in known:
                raise DomainError(f"unknown config key {k!r}")
            if v is not None:
                base[k] = v
        return cls(**base)

    @classmethod
    def from_json(cls, path, figure: str, overrides: dict | None = None) -> "SweepConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        data.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls.for_figure(figure, data)


def _fig3_row(args):
    I, M = args
    mu = I / M
    if I == 0:
        return [I, M, 0.0, 0.0, 0.0, 0.0]
    r = correlations(microscopic_pair(Family.THERMAL, mu))
    return [I, M, mu, r.quantum, r.classical, r.total]


def _coarse_row(args):
    family, I, M, R, normalized = args
    mu = I / M
    snr_fn = snr_thermal if family is Family.THERMAL else snr_entangled
    if I == 0:
        return [I, M, R, 0.0, 0.0, 0.0, 0.0, 0.0]
    sigma = coarse_grained(family, mu, R)
    r = normalized_correlations(sigma, R) if normalized else correlations(sigma)
    return [I, M, R, mu, r.quantum, r.classical, r.total, snr_fn(mu, M, R)]


def _fig5_row(args):
    I, M, R, normalized = args
    th = _coarse_row((Family.THERMAL, I, M, R, normalized))
    sp = _coarse_row((Family.SPDC, I, M, R, normalized))
    return [I, M, R, th[3], th[6], sp[6], sp[4], sp[5], th[7], sp[7]]


HEADERS = {
    "fig3": ["I", "M", "mu", "Q", "C", "T"],
    "fig4": ["I", "M", "R", "mu", "Q_norm", "C_norm", "T_norm", "SNR"],
    "fig5": ["I", "M", "R", "mu", "T_norm_thermal", "T_norm_spdc", "Q_norm_spdc", "C_norm_spdc",
             "SNR_thermal", "SNR_entangled"],
}


def _map(fn, jobs, threads):
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * threads))))
    return [fn(j) for j in jobs]


@dataclass
class FigureData:
    figure: str
    config: SweepConfig
    header: list
    rows: list
    stats: dict

    def column(self, name) -> np.ndarray:
        i = self.header.index(name)
        return np.array([r[i] for r in self.rows], dtype=float)

    def to_csv(self) -> str:
        buf = io.StringIO()
        params = asdict(self.config)
        params.pop("out", None)
        params.pop("threads", None)
        buf.write(f"# schema: ghostcorr-{self.figure}/{SCHEMA_VERSION}\n")
        buf.write(f"# params: {json.dumps(params, sort_keys=True)}\n")
        buf.write(f"# seed: {self.config.rng_seed}\n")
        for k, v in self.stats.items():
            buf.write(f"# {k}: {_fmt(v)}\n")
        buf.write(",".join(self.header) + "\n")
        for row in self.rows:
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        return buf.getvalue()

    def write(self, path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def run_figure(figure: str, config: SweepConfig) -> FigureData:
    I, M, R = config.grid()
    fam = Family.parse(config.family)
    if figure == "fig3":
        jobs = [(i, m) for m in M for i in I]
        rows = _map(_fig3_row, jobs, config.threads)
        crossing = [abs(r[3] - r[4]) for r in rows if r[0] == r[1] and r[0] > 0]
        stats = {"max_abs_Q_minus_C_at_I_eq_M": max(crossing) if crossing else float("nan")}
    elif figure == "fig4":
        jobs = [(fam, i, m, r, config.normalized) for r in R for m in M for i in I]
        rows = _map(_coarse_row, jobs, config.threads)
        dev = np.array([abs(r[7] - r[6]) for r in rows])
        tot = np.array([r[6] for r in rows])
        with np.errstate(invalid="ignore", divide="ignore"):
            rel = np.where(tot > 0, np.abs(np.array([r[7] for r in rows]) / tot - 1.0), 0.0)
        stats = {
            "max_abs_SNR_minus_T": float(dev.max()),
            "max_T": float(tot.max()),
            "max_dev_over_max_T": float(dev.max() / tot.max()) if tot.max() > 0 else float("nan"),
            "max_rel_SNR_over_T_minus_1": float(rel.max()),
        }
    elif figure == "fig5":
        jobs = [(i, m, r, config.normalized) for r in R for m in M for i in I]
        rows = _map(_fig5_row, jobs, config.threads)
        last = rows[-1]
        stats = {"T_gap_at_max_I": abs(last[4] - last[5])}
    else:
        raise DomainError(f"unknown figure {figure!r}; choose from {FIGURES}")
    return FigureData(figure, config, HEADERS[figure], rows, stats)
