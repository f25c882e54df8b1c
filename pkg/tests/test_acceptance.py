"""Acceptance criteria, one test each, with the tolerances pinned below.

Every test prints a ``[PASS]``/``[FAIL]`` line, collected again in the pytest
terminal summary.  Run directly (``python3 tests/test_acceptance.py``) for the
table alone.
"""
from __future__ import annotations

import json
import math
import os
import sys
import time

import mpmath
import numpy as np
import pytest

from ghostcorr import gaussian_core as gc
from ghostcorr import lensless as ll
from ghostcorr import montecarlo as mc
from ghostcorr import snr
from ghostcorr.cli import main as cli_main
from ghostcorr.sources import Family, SourceSpec, coarse_grained, microscopic_pair, normalized_correlations
from ghostcorr.sweeps import SweepConfig, run_figure
from ghostcorr.validate import random_physical_states

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []

# criterion 1
CROSS_TOL = 1e-9
CROSS_VALUE = 0.431523
CROSS_VALUE_TOL = 1e-6
CROSS_MUS = (0.1, 0.5, 2.0, 10.0)
CROSS_RUNTIME = 1.0
# criterion 2
LIN_R = 100
LIN_M = (1, 10, 100, 1000)
LIN_I = {"log": [1e-3, 1000.0, 40]}
LIN_REL = 0.01
LIN_RUNTIME = 10.0
# criterion 3
RATIO_R = 100
RATIO_STATED = 0.992525
RATIO_TOL = 1e-6
RATIO_LARGE_R = 1e4
RATIO_LARGE_TOL = 1e-3
FINITE_M_RATIO = 0.978
FINITE_M_TOL = 5e-4
RATIO_RUNTIME = 1.0
# criterion 4
LIMIT_MU = 1e6
LIMIT_R = 100
LIMIT_ABS = 1e-3
LIMIT_REL = 1e-3
LIMIT_FINITE_MUS = (0.1, 1.0, 10.0, 100.0)
LIMIT_RUNTIME = 1.0
# criterion 5
ORACLE_STATES = 50
ORACLE_TOL = 1e-6
ORACLE_RUNTIME = 30.0
# criterion 6
SEP_MUS = (0.1, 1.0, 10.0, 100.0)
SEP_RS = (1, 4, 100, 1e4)
SEP_RUNTIME = 1.0
# criterion 7
MC_MU, MC_M, MC_R = 1.0, 10, 25
MC_FRAMES = 100_000
MC_SEED = 12345
MC_SNR_SIGMAS = 3.0
MC_MODE_SIGMAS = 5.0
MC_RUNTIME = 120.0
# criterion 8
LENS_RATIOS = (4, 25, 100)
LENS_GRID = 256
LENS_REL = 0.05
LENS_OFFDIAG = 0.05
LENS_FAR = 5.0  # separations in units of the coherence radius
LENS_RUNTIME = 60.0
# criterion 9
DET_SEED = 2718281828
DET_THREADS = (1, 4)


def report(criterion: int, passed: bool, detail: str) -> None:
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def info(criterion: int, detail: str) -> None:
    line = f"[INFO] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def test_criterion_1_crossover():
    t0 = time.perf_counter()
    r1 = gc.correlations(microscopic_pair(Family.THERMAL, 1.0))
    gap = abs(r1.quantum - r1.classical)
    signs = {}
    for mu in CROSS_MUS:
        r = gc.correlations(microscopic_pair(Family.THERMAL, mu))
        signs[mu] = np.sign(r.quantum - r.classical) == np.sign(1.0 - mu)
    elapsed = time.perf_counter() - t0
    ok = (gap <= CROSS_TOL and abs(r1.quantum - CROSS_VALUE) <= CROSS_VALUE_TOL
          and abs(r1.classical - CROSS_VALUE) <= CROSS_VALUE_TOL and all(signs.values())
          and elapsed < CROSS_RUNTIME)
    report(1, ok, f"Q(1)={r1.quantum:.7f} C(1)={r1.classical:.7f} |Q-C|={gap:.1e}, "
                  f"sign(Q-C)=sign(1-mu) at {list(CROSS_MUS)}: {all(signs.values())}, {elapsed:.3f} s")
    assert ok


def test_criterion_2_quasi_linearity():
    t0 = time.perf_counter()
    cfg = SweepConfig.for_figure("fig4", {"I": LIN_I, "M": list(LIN_M), "R": [LIN_R]})
    data = run_figure("fig4", cfg)
    elapsed = time.perf_counter() - t0
    S, T, M = data.column("SNR"), data.column("T_norm"), data.column("M")
    dev = np.abs(S - T)
    bound = LIN_REL * T.max()
    ok = dev.max() <= bound and elapsed < LIN_RUNTIME
    per_m = ", ".join(f"M={int(m)}: {dev[M == m].max():.2e}" for m in LIN_M)
    report(2, ok, f"max|SNR-T|={dev.max():.3e} vs bound {bound:.3e} "
                  f"({dev.max() / T.max():.2%} of max T); per M: {per_m}; {elapsed:.2f} s")
    assert ok


def test_criterion_3_ratio_limit():
    t0 = time.perf_counter()
    value = snr.ratio_limit(RATIO_R)
    large = snr.ratio_limit(RATIO_LARGE_R)
    finite = snr.finite_m_ratio_limit(1, RATIO_R)
    elapsed = time.perf_counter() - t0
    with mpmath.workdps(40):
        R = mpmath.mpf(RATIO_R)
        evaluated = float(mpmath.sqrt(1 / (2 * R + 1)) / (mpmath.sqrt(R / 2) * mpmath.log(R / (R - 1))))
    ok = (abs(value - evaluated) <= RATIO_TOL and abs(large - 1.0) <= RATIO_LARGE_TOL
          and abs(finite - FINITE_M_RATIO) <= FINITE_M_TOL and elapsed < RATIO_RUNTIME)
    report(3, ok, f"ratio_limit({RATIO_R})={value:.9f} (40-digit evaluation {evaluated:.9f}), "
                  f"ratio_limit(1e4)={large:.7f}, finite-M ratio (M=1)={finite:.6f}; {elapsed:.4f} s")
    info(3, f"stated value {RATIO_STATED} differs from the evaluation by "
            f"{abs(evaluated - RATIO_STATED):.2e} (> {RATIO_TOL:g}); see the decisions ledger")
    assert ok


def test_criterion_4_common_limit():
    t0 = time.perf_counter()
    lim = math.sqrt(LIMIT_R / 2) * math.log(LIMIT_R / (LIMIT_R - 1))
    th = normalized_correlations(coarse_grained(Family.THERMAL, LIMIT_MU, LIMIT_R), LIMIT_R).total
    sp = normalized_correlations(coarse_grained(Family.SPDC, LIMIT_MU, LIMIT_R), LIMIT_R).total
    order = {}
    for mu in LIMIT_FINITE_MUS:
        a = normalized_correlations(coarse_grained(Family.THERMAL, mu, LIMIT_R), LIMIT_R).total
        b = normalized_correlations(coarse_grained(Family.SPDC, mu, LIMIT_R), LIMIT_R).total
        order[mu] = b > a
    elapsed = time.perf_counter() - t0
    ok = (abs(th - sp) <= LIMIT_ABS and abs(th / lim - 1) <= LIMIT_REL
          and abs(sp / lim - 1) <= LIMIT_REL and all(order.values()) and elapsed < LIMIT_RUNTIME)
    report(4, ok, f"T_th={th:.8f} T_spdc={sp:.8f} limit={lim:.8f}, "
                  f"T_spdc > T_th at {list(LIMIT_FINITE_MUS)}: {all(order.values())}; {elapsed:.3f} s")
    assert ok


def test_criterion_5_oracle():
    t0 = time.perf_counter()
    states = random_physical_states(ORACLE_STATES, seed=2012)
    diffs = [abs(gc.optimal_conditional_determinant(s) - gc.measurement_oracle(s)) for s in states]
    elapsed = time.perf_counter() - t0
    ok = max(diffs) <= ORACLE_TOL and elapsed < ORACLE_RUNTIME
    report(5, ok, f"{len(states)} states, max |det eps closed form - oracle| = {max(diffs):.2e}; {elapsed:.1f} s")
    assert ok


def test_criterion_6_separability():
    t0 = time.perf_counter()
    wrong = []
    for mu in SEP_MUS:
        for R in SEP_RS:
            if gc.symplectic_spectrum(coarse_grained(Family.THERMAL, mu, R)).nu_tilde_minus < 1:
                wrong.append(("thermal", mu, R))
            ent = gc.symplectic_spectrum(coarse_grained(Family.SPDC, mu, R)).nu_tilde_minus < 1
            if ent != (R < 1 + 1 / mu):
                wrong.append(("spdc", mu, R))
    elapsed = time.perf_counter() - t0
    ok = not wrong and elapsed < SEP_RUNTIME
    report(6, ok, f"{len(SEP_MUS) * len(SEP_RS)} grid points per family, mismatches: {wrong or 'none'}; {elapsed:.3f} s")
    assert ok


@pytest.mark.parametrize("family", [Family.THERMAL, Family.SPDC])
def test_criterion_7_monte_carlo(family):
    spec = SourceSpec(family, MC_MU, MC_M, MC_R)
    mask = mc.MaskImage.for_spec(spec)
    t0 = time.perf_counter()
    ens = mc.simulate(spec, mask, MC_FRAMES, MC_SEED, threads=1)
    res = mc.empirical_snr(ens)
    elapsed = time.perf_counter() - t0
    check = mc.consistency_check(ens, res, MC_SNR_SIGMAS, MC_MODE_SIGMAS)
    summ = mc.summary(ens, res)
    ok = check["passed"] and elapsed < MC_RUNTIME
    report(7, ok, f"{family.value}: SNR {res.snr_hat:.5f} +- {res.snr_stderr:.5f} vs {summ['snr_analytic']:.5f} "
                  f"(z={summ['snr_z']:+.2f}), mode cov {res.mode_cross_cov:.5f} +- {res.mode_cross_cov_stderr:.5f} "
                  f"vs {summ['mode_cross_cov_expected']:.1f}; {elapsed:.1f} s single-threaded")
    assert ok


def test_criterion_7_worker_scaling():
    cpus = len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count()
    if cpus < 2:
        info(7, f"worker scaling not measurable: {cpus} CPU available")
        pytest.skip(f"only {cpus} CPU available")
    spec = SourceSpec(Family.THERMAL, MC_MU, MC_M, MC_R)
    mask = mc.MaskImage.for_spec(spec)
    workers = min(cpus, 4)
    times = {}
    for w in (1, workers):
        t0 = time.perf_counter()
        mc.simulate(spec, mask, MC_FRAMES // 2, MC_SEED, threads=w)
        times[w] = time.perf_counter() - t0
    speedup = times[1] / times[workers]
    ok = speedup >= 0.6 * workers
    report(7, ok, f"speedup {speedup:.2f}x with {workers} workers")
    assert ok


def test_criterion_8_lensless():
    t0 = time.perf_counter()
    setup = ll.PropagationSetup(detector_points=LENS_GRID)
    nd = setup.detector_points
    errs = {}
    for q in LENS_RATIOS:
        Ab = (nd * setup.detector_spacing) ** 2
        Ap = Ab / q
        cross = ll.bucket_pixel_cross(setup, Ap, Ab)
        errs[q] = cross / math.sqrt(1.0 / q) - 1.0
    x, prof = ll.correlation_profile(setup)
    far = x >= LENS_FAR * setup.coherence_radius
    off = float(prof[far].max())
    elapsed = time.perf_counter() - t0
    ok = all(abs(e) <= LENS_REL for e in errs.values()) and off <= LENS_OFFDIAG and elapsed < LENS_RUNTIME
    report(8, ok, "cross/sqrt(Ap/Ab)-1: " + ", ".join(f"{q}: {e:+.4f}" for q, e in errs.items())
                  + f"; max off-diagonal beyond {LENS_FAR:g} coherence radii = {off:.4f}; {elapsed:.1f} s")
    assert ok


def test_criterion_9_determinism(tmp_path):
    args = ["simulate", "--family", "thermal", "--mu", str(MC_MU), "--M", str(MC_M), "--R", str(MC_R),
            "--frames", str(MC_FRAMES), "--seed", str(DET_SEED)]
    outputs = []
    for i, threads in enumerate(DET_THREADS + (DET_THREADS[0],)):
        js, fr = tmp_path / f"s{i}.json", tmp_path / f"f{i}.csv"
        assert cli_main(args + ["--threads", str(threads), "--out", str(js), "--frames-csv", str(fr)]) == 0
        outputs.append((threads, js.read_bytes(), fr.read_bytes()))
    same = all(o[1:] == outputs[0][1:] for o in outputs)
    seed_echo = json.loads(outputs[0][1])["seed"] == DET_SEED
    ok = same and seed_echo
    report(9, ok, f"summary and frame CSV bit-identical over runs with threads "
                  f"{[o[0] for o in outputs]}: {same}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))
