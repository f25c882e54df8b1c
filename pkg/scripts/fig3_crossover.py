"""Quantum vs classical correlations of split thermal light against illumination.

Curves for M = 1, 2, 5, 10 cross where I = M, i.e. at one photon per mode.
"""
from _common import parser, save_plot

import numpy as np

from ghostcorr.sweeps import SweepConfig, run_figure


def main():
    args = parser(__doc__.splitlines()[0]).parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    M = [1, 2, 5, 10]
    # put every I = M point on the grid so the crossing is sampled exactly
    I = sorted(set(np.geomspace(1e-2, 1e2, 81).tolist()) | {float(m) for m in M})
    cfg = SweepConfig.for_figure("fig3", {"I": I, "M": M})
    data = run_figure("fig3", cfg)
    path = args.out_dir / "fig3.csv"
    data.write(path)
    print(f"wrote {path}")
    for m in cfg.M:
        I, Q, C = (data.column(k)[data.column("M") == m] for k in ("I", "Q", "C"))
        k = abs(Q - C).argmin()
        print(f"M={m:>3}: Q and C closest at I={I[k]:.3f} (|Q-C|={abs(Q[k] - C[k]):.2e})")

    if args.plot:
        def draw(plt):
            fig, ax = plt.subplots(figsize=(5, 3.5))
            for m in cfg.M:
                sel = data.column("M") == m
                ax.loglog(data.column("I")[sel], data.column("Q")[sel], "-", label=f"Q, M={m}")
                ax.loglog(data.column("I")[sel], data.column("C")[sel], "--", label=f"C, M={m}")
            ax.set_xlabel("I")
            ax.set_ylabel("nats")
            ax.legend(fontsize=6, ncol=2)
            return fig
        save_plot(draw, args.out_dir / "fig3.png")


if __name__ == "__main__":
    main()
