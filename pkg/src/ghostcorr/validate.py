"""Invariant suite run by ``ghostcorr validate``.

Each check returns a :class:`Check`; the entropy function and oracle
tolerance are injectable so regressions can be demonstrated.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import gaussian_core as gc
from . import snr
from .errors import GhostCorrError
from .sources import (
    Family,
    coarse_grained,
    high_illumination_total,
    microscopic_pair,
)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def random_physical_states(n: int, seed: int = 2012, lo: float = 1.0, hi: float = 10.0):
    """Rejection-sample standard-form states with ``a, b`` uniform in ``[lo, hi]``."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        a, b = rng.uniform(lo, hi, 2)
        c, d = rng.uniform(-hi, hi, 2)
        try:
            s = gc.TwoModeCovariance(a, b, c, d)
        except GhostCorrError:
            continue
        if s.b > 1.0 + 1e-9:
            out.append(s)
    return out


def _norm_total(family, mu, R, entropy):
    s = coarse_grained(family, mu, R)
    return np.sqrt(R / 2.0) * gc.correlations(s, entropy=entropy).total


def check_entropy_sign(entropy: Callable) -> Check:
    bad = []
    for mu in (0.1, 1.0, 10.0):
        for fam in Family:
            t = gc.mutual_information(microscopic_pair(fam, mu), entropy=entropy)
            if not t > 0:
                bad.append(f"{fam.value} mu={mu}: T={t:.6g}")
    detail = "all T > 0" if not bad else "negative T (check the sign in f): " + "; ".join(bad)
    return Check("mutual information positive", not bad, detail)


def check_additivity(entropy: Callable, states) -> Check:
    worst = 0.0
    for s in states:
        r = gc.correlations(s, entropy=entropy)
        worst = max(worst, abs(r.quantum + r.classical - gc.mutual_information(s, entropy=entropy)))
    return Check("Q + C = T", worst <= 1e-12, f"max |Q + C - T| = {worst:.2e}")


def check_oracle(states, tol: float, density: int = 200) -> Check:
    worst = 0.0
    for s in states:
        worst = max(worst, abs(gc.optimal_conditional_determinant(s) - gc.measurement_oracle(s, density)))
    return Check(
        "closed-form det(eps) = oracle",
        worst <= tol,
        f"{len(states)} states, max discrepancy {worst:.2e} (tol {tol:.0e})",
    )


def check_physicality() -> Check:
    worst = np.inf
    for fam in Family:
        for mu in (0.0, 0.1, 1.0, 10.0, 1e3):
            for R in (1, 4, 100, 1e4):
                worst = min(worst, gc.symplectic_spectrum(coarse_grained(fam, mu, R)).nu_minus)
    return Check("constructors physical", worst >= 1 - 1e-9, f"min nu_minus = {worst:.12f}")


def check_separability() -> Check:
    wrong = []
    for mu in (0.1, 1.0, 10.0, 100.0):
        for R in (1, 4, 100, 1e4):
            if gc.symplectic_spectrum(coarse_grained(Family.THERMAL, mu, R)).nu_tilde_minus < 1:
                wrong.append(f"thermal mu={mu} R={R} entangled")
            ent = gc.symplectic_spectrum(coarse_grained(Family.SPDC, mu, R)).nu_tilde_minus < 1
            if ent != (R < 1 + 1 / mu):
                wrong.append(f"spdc mu={mu} R={R} entangled={ent}")
    return Check("separability structure", not wrong, "; ".join(wrong) or "thermal separable, SPDC iff R < 1 + 1/mu")


def check_crossover(entropy: Callable) -> Check:
    r1 = gc.correlations(microscopic_pair(Family.THERMAL, 1.0), entropy=entropy)
    ok = abs(r1.quantum - r1.classical) <= 1e-9
    signs = []
    for mu in (0.1, 0.5, 2.0, 10.0):
        r = gc.correlations(microscopic_pair(Family.THERMAL, mu), entropy=entropy)
        signs.append(np.sign(r.quantum - r.classical) == np.sign(1 - mu))
    ok = ok and all(signs)
    return Check("Q = C at mu = 1", bool(ok), f"|Q - C| = {abs(r1.quantum - r1.classical):.2e} at mu=1")


def check_ratio_limits() -> Check:
    r100 = snr.ratio_limit(100)
    r1e4 = snr.ratio_limit(1e4)
    ok = abs(r1e4 - 1.0) <= 1e-3 and r100 < r1e4 < 1.0
    return Check("ratio limit -> 1", ok, f"R=100: {r100:.7f}, R=1e4: {r1e4:.7f}")


def check_common_limit(entropy: Callable) -> Check:
    R, mu = 100, 1e6
    lim = high_illumination_total(R)
    th = _norm_total(Family.THERMAL, mu, R, entropy)
    sp = _norm_total(Family.SPDC, mu, R, entropy)
    ok = abs(th - sp) <= 1e-3 and abs(th / lim - 1) <= 1e-3 and abs(sp / lim - 1) <= 1e-3
    return Check("common high-illumination limit", bool(ok),
                 f"T_th={th:.7f}, T_spdc={sp:.7f}, limit={lim:.7f}")


def run_validation(entropy: Callable = gc.entropy_f, oracle_tol: float = 1e-6,
                   n_states: int = 50, seed: int = 2012) -> list[Check]:
    states = random_physical_states(n_states, seed)
    checks = [check_entropy_sign(entropy)]
    for fn in (
        lambda: check_additivity(entropy, states),
        lambda: check_oracle(states, oracle_tol),
        check_physicality,
        check_separability,
        lambda: check_crossover(entropy),
        check_ratio_limits,
        lambda: check_common_limit(entropy),
    ):
        try:
            checks.append(fn())
        except (GhostCorrError, FloatingPointError) as exc:
            checks.append(Check(getattr(fn, "__name__", "check"), False, f"error: {exc}"))
    return checks


def format_table(checks: list[Check]) -> str:
    width = max(len(c.name) for c in checks)
    lines = [f"{'check':<{width}}  result  detail"]
    for c in checks:
        lines.append(f"{c.name:<{width}}  {'PASS' if c.passed else 'FAIL':<6}  {c.detail}")
    return "\n".join(lines)
