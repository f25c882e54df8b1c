"""Entangled (SPDC) against thermal light: correlations and SNR at R = 100, M = 1."""
from _common import parser, save_plot

import numpy as np

from ghostcorr.sources import high_illumination_total
from ghostcorr.sweeps import SweepConfig, run_figure


def main():
    args = parser(__doc__).parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    cfg = SweepConfig.for_figure("fig5")
    data = run_figure("fig5", cfg)
    path = args.out_dir / "fig5.csv"
    data.write(path)
    print(f"wrote {path}")
    pos = data.column("I") > 0
    ratio = data.column("SNR_entangled")[pos] / data.column("T_norm_spdc")[pos]
    print(f"common limit {high_illumination_total(cfg.R[0]):.6f}; gap at I_max {data.stats['T_gap_at_max_I']:.2e}")
    print(f"SNR/T for SPDC falls from {ratio[0]:.2f} to {ratio[-1]:.4f} "
          f"(monotone: {bool(np.all(np.diff(ratio) < 0))})")

    if args.plot:
        def draw(plt):
            fig, (a, b) = plt.subplots(1, 2, figsize=(8, 3.5))
            I = data.column("I")[pos]
            a.semilogx(I, data.column("T_norm_thermal")[pos], label="thermal")
            a.semilogx(I, data.column("T_norm_spdc")[pos], label="SPDC")
            a.set_xlabel("I")
            a.set_ylabel("normalized T")
            a.legend()
            b.plot(data.column("T_norm_spdc")[pos], data.column("SNR_entangled")[pos], label="SPDC")
            b.plot(data.column("T_norm_thermal")[pos], data.column("SNR_thermal")[pos], label="thermal")
            b.set_xlabel("normalized T")
            b.set_ylabel("SNR")
            b.legend()
            return fig
        save_plot(draw, args.out_dir / "fig5.png")


if __name__ == "__main__":
    main()
