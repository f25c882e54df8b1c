"""SNR against normalized total correlations for split thermal light, R = 100."""
from _common import parser, save_plot

import numpy as np

from ghostcorr.snr import finite_m_ratio_limit
from ghostcorr.sweeps import SweepConfig, run_figure


def main():
    args = parser(__doc__).parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    cfg = SweepConfig.for_figure("fig4")
    data = run_figure("fig4", cfg)
    path = args.out_dir / "fig4.csv"
    data.write(path)
    print(f"wrote {path}")
    for k, v in data.stats.items():
        print(f"{k}: {v:.4g}")
    S, T, M = data.column("SNR"), data.column("T_norm"), data.column("M")
    for m in cfg.M:
        sel = M == m
        print(f"M={m:>5}: max|SNR-T|={np.abs(S - T)[sel].max():.3e}, "
              f"SNR/T at I=max {S[sel][-1] / T[sel][-1]:.5f}, "
              f"mu->inf ratio {finite_m_ratio_limit(m, cfg.R[0]):.5f}")

    if args.plot:
        def draw(plt):
            fig, ax = plt.subplots(figsize=(4, 4))
            for m in cfg.M:
                sel = M == m
                ax.plot(T[sel], S[sel], ".-", ms=3, label=f"M={m}")
            lim = max(T.max(), S.max())
            ax.plot([0, lim], [0, lim], "k:", lw=0.8)
            ax.set_xlabel("normalized T")
            ax.set_ylabel("SNR")
            ax.legend()
            return fig
        save_plot(draw, args.out_dir / "fig4.png")


if __name__ == "__main__":
    main()
