"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import GhostCorrError
from .gaussian_core import correlations, symplectic_spectrum
from .sources import Family, coarse_grained, microscopic_pair, normalization_factor

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_config(path):
    if not path:
        return {}
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _flags(args, *names):
    return {n: getattr(args, n) for n in names if getattr(args, n, None) is not None}


def correlation_report(family, mu: float, R: float = 1.0, coarse: bool = False) -> dict:
    family = Family.parse(family)
    sigma = coarse_grained(family, mu, R) if coarse else microscopic_pair(family, mu)
    r = correlations(sigma)
    sp = symplectic_spectrum(sigma)
    k = normalization_factor(R)
    return {
        "schema": "ghostcorr-correlations/1",
        "family": family.value,
        "mu": mu,
        "R": R,
        "coarse": coarse,
        "covariance": {"a": sigma.a, "b": sigma.b, "c": sigma.c, "d": sigma.d},
        "Q": r.quantum,
        "C": r.classical,
        "T": r.total,
        "norm_factor": k,
        "Q_norm": r.quantum * k,
        "C_norm": r.classical * k,
        "T_norm": r.total * k,
        "nu_plus": sp.nu_plus,
        "nu_minus": sp.nu_minus,
        "nu_tilde_minus": sp.nu_tilde_minus,
        "entangled": r.entangled,
        "cond_det": r.cond_det,
    }


def cmd_correlations(args) -> int:
    cfg = _load_config(args.config)
    cfg.update(_flags(args, "family", "mu", "I", "M", "R"))
    family = cfg.get("family", "thermal_split")
    if "mu" in cfg:
        mu = float(cfg["mu"])
    elif "I" in cfg:
        mu = float(cfg["I"]) / float(cfg.get("M", 1))
    else:
        raise GhostCorrError("give --mu, or --I with --M")
    R = float(cfg.get("R", 1))
    coarse = bool(args.coarse or cfg.get("coarse", False) or R != 1)
    rep = correlation_report(family, mu, R, coarse)
    if args.format == "csv":
        keys = [k for k, v in rep.items() if not isinstance(v, dict)]
        text = ",".join(keys) + "\n" + ",".join(_csv_val(rep[k]) for k in keys) + "\n"
    else:
        text = json.dumps(rep, indent=2) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def _csv_val(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    return str(v)


def cmd_figure(args) -> int:
    from .sweeps import SweepConfig, run_figure

    overrides = _flags(args, "family", "I", "M", "R", "threads")
    if args.seed is not None:
        overrides["rng_seed"] = args.seed
    for k in ("I", "M", "R"):
        if k in overrides:
            overrides[k] = json.loads(overrides[k])
    if args.config:
        cfg = SweepConfig.from_json(args.config, args.figure, overrides)
    else:
        cfg = SweepConfig.for_figure(args.figure, overrides)
    if args.raw:
        cfg.normalized = False
    data = run_figure(args.figure, cfg)
    out = args.out or cfg.out
    if args.format == "json":
        text = json.dumps({"figure": data.figure, "header": data.header, "rows": data.rows,
                           "stats": data.stats}, indent=1) + "\n"
    else:
        text = data.to_csv()
    _emit(text, out)
    if out:
        for k, v in data.stats.items():
            print(f"{k}: {v:.6g}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    from . import montecarlo as mc
    from .sources import SourceSpec

    cfg = _load_config(args.config)
    cfg.update(_flags(args, "family", "mu", "M", "R", "frames", "seed", "mask", "threads"))
    spec = SourceSpec(cfg.get("family", "thermal_split"), float(cfg.get("mu", 1.0)),
                      int(cfg.get("M", 10)), int(cfg.get("R", 25)))
    if "mask" in cfg:
        pattern = str(cfg["mask"])
        if set(pattern) - {"0", "1"}:
            raise GhostCorrError("--mask must be a string of 0/1 characters")
        mask = mc.MaskImage(tuple(ch == "1" for ch in pattern))
        if mask.n_in != spec.R:
            spec = SourceSpec(spec.family, spec.mu, spec.M, mask.n_in)
    else:
        mask = mc.MaskImage.for_spec(spec)
    seed = int(cfg.get("seed", 0))
    ens = mc.simulate(spec, mask, int(cfg.get("frames", 100_000)), seed, int(cfg.get("threads", 1)))
    res = mc.empirical_snr(ens, args.batches)
    summary = mc.summary(ens, res)
    verdict = mc.consistency_check(ens, res)
    summary["check"] = verdict
    text = json.dumps(summary, indent=2, sort_keys=True, default=float) + "\n"
    _emit(text, args.out)
    if args.frames_csv:
        ens.to_csv(args.frames_csv)
    if args.check and not verdict["passed"]:
        print("consistency check FAILED: " + json.dumps(verdict), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_lensless(args) -> int:
    from . import lensless as ll

    cfg = _load_config(args.config)
    cfg.update(_flags(args, "source_radius", "z", "wavelength", "detector_points",
                      "detector_spacing", "source_points"))
    setup = ll.PropagationSetup(**cfg)
    ratios = json.loads(args.ratios)
    nd = setup.detector_points
    rows = []
    for q in ratios:
        bucket_side = nd - (nd % 2)
        pixel_side = bucket_side / np.sqrt(q)
        Ap = (pixel_side * setup.detector_spacing) ** 2
        Ab = (bucket_side * setup.detector_spacing) ** 2
        cross = ll.bucket_pixel_cross(setup, Ap, Ab)
        expect = ll.realized_area_ratio(setup, Ap, Ab)
        rows.append({"area_ratio": q, "cross": cross, "sqrt_area_ratio": expect,
                     "rel_error": cross / expect - 1.0,
                     "commutator_pixel": ll.commutator(setup, ll.square_region(setup, Ap))})
    report = {"schema": "ghostcorr-lensless/1", "setup": setup.to_dict(), "scaling": rows}
    if not args.skip_crosscheck:
        report["quadrature_vs_fft_max_rel"] = ll.crosscheck_paths(setup, seed=args.seed or 0)
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    if args.field_csv:
        small = ll.PropagationSetup(
            wavelength=setup.wavelength, z=setup.z, source_radius=args.field_radius,
            detector_points=args.field_points, detector_spacing=setup.detector_spacing,
            source_points=args.field_source_points,
        )
        grid = ll.field_correlations(small, args.mean_photons)
        grid.to_csv(args.field_csv)
        grid.to_json(str(Path(args.field_csv).with_suffix(".json")))
    bad = [r for r in rows if abs(r["rel_error"]) > args.tolerance]
    if args.check and bad:
        print(f"{len(bad)} ratio(s) outside tolerance {args.tolerance}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_validate(args) -> int:
    from .validate import format_table, run_validation

    checks = run_validation(oracle_tol=args.oracle_tol, n_states=args.states)
    print(format_table(checks))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="unsigned 64-bit RNG seed")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--threads", type=int, help="worker processes")
    common.add_argument("--check", action="store_true", help="nonzero exit if consistency fails")
    common.add_argument("--config", help="JSON config file; flags override its values")

    p = argparse.ArgumentParser(prog="ghostcorr", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("correlations", parents=[common], help="Q, C, T of one source pair")
    c.add_argument("--family", choices=("thermal", "thermal_split", "spdc"))
    c.add_argument("--mu", type=float)
    c.add_argument("--I", type=float, help="illumination (with --M)")
    c.add_argument("--M", type=float)
    c.add_argument("--R", type=float, help="pixel count; R > 1 implies --coarse")
    c.add_argument("--coarse", action="store_true")
    c.set_defaults(func=cmd_correlations, default_format="json")

    f = sub.add_parser("figure", parents=[common], help="emit figure data")
    f.add_argument("figure", choices=("fig3", "fig4", "fig5"))
    f.add_argument("--family", choices=("thermal", "thermal_split", "spdc"))
    f.add_argument("--I", help='JSON list or {"log": [lo, hi, n]}')
    f.add_argument("--M", help="JSON list")
    f.add_argument("--R", help="JSON list")
    f.add_argument("--raw", action="store_true", help="skip the sqrt(R/2) normalization")
    f.set_defaults(func=cmd_figure, default_format="csv")

    s = sub.add_parser("simulate", parents=[common], help="Monte Carlo ghost imaging")
    s.add_argument("--family", choices=("thermal", "thermal_split", "spdc"))
    s.add_argument("--mu", type=float)
    s.add_argument("--M", type=int)
    s.add_argument("--R", type=int, help="transparent pixels (bucket pixel count)")
    s.add_argument("--frames", type=int)
    s.add_argument("--mask", help="0/1 string; default R transparent + R opaque")
    s.add_argument("--batches", type=int, default=20)
    s.add_argument("--frames-csv", help="also write the per-frame counts")
    s.set_defaults(func=cmd_simulate, default_format="json")

    ln = sub.add_parser("lensless", parents=[common], help="lensless bucket/pixel scaling")
    ln.add_argument("--ratios", default="[4, 25, 100]", help="JSON list of A_b/A_p")
    ln.add_argument("--source-radius", dest="source_radius", type=float)
    ln.add_argument("--z", type=float)
    ln.add_argument("--wavelength", type=float)
    ln.add_argument("--detector-points", dest="detector_points", type=int)
    ln.add_argument("--detector-spacing", dest="detector_spacing", type=float)
    ln.add_argument("--source-points", dest="source_points", type=int)
    ln.add_argument("--tolerance", type=float, default=0.05)
    ln.add_argument("--skip-crosscheck", action="store_true")
    ln.add_argument("--field-csv", help="also export a small FieldGrid matrix")
    ln.add_argument("--field-radius", type=float, default=4e-3)
    ln.add_argument("--field-points", type=int, default=24)
    ln.add_argument("--field-source-points", type=int, default=1024)
    ln.add_argument("--mean-photons", type=float, default=1.0)
    ln.set_defaults(func=cmd_lensless, default_format="json")

    v = sub.add_parser("validate", parents=[common], help="run the invariant suite")
    v.add_argument("--oracle-tol", type=float, default=1e-6)
    v.add_argument("--states", type=int, default=50)
    v.set_defaults(func=cmd_validate, default_format="json")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    # parent-parser actions are shared, so per-command defaults live elsewhere
    if args.format is None:
        args.format = args.default_format
    try:
        return args.func(args)
    except (GhostCorrError, ValueError, KeyError, TypeError, OSError) as exc:
        print(f"ghostcorr {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
