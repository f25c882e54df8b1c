"""Bucket/pixel cross-correlation against sqrt(A_p/A_b), plus the coherence width vs source radius."""
import json

import numpy as np
from _common import parser

from ghostcorr import lensless as ll


def main():
    args = parser(__doc__).parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    setup = ll.PropagationSetup()
    nd = setup.detector_points
    Ab = (nd * setup.detector_spacing) ** 2
    scaling = []
    for q in (2, 4, 9, 16, 25, 49, 100, 256):
        Ap = Ab / q
        cross = ll.bucket_pixel_cross(setup, Ap, Ab)
        ideal = ll.realized_area_ratio(setup, Ap, Ab)
        scaling.append({"area_ratio": q, "cross": cross, "sqrt_area_ratio": ideal})
        print(f"A_b/A_p={q:>4}: cross {cross:.5f}  sqrt(A_p/A_b) {ideal:.5f}  rel {cross / ideal - 1:+.4f}")

    widths = []
    for a in (1e-3, 2e-3, 4e-3, 8e-3):
        s = ll.PropagationSetup(source_radius=a, detector_points=32, source_points=2048)
        w = ll.field_correlations(s, 1.0).correlation_width()
        airy = 2.215211 * s.z / (s.k0 * a)
        widths.append({"source_radius": a, "hwhm": w, "airy_hwhm": airy})
        print(f"a={a * 1e3:.0f} mm: HWHM {w * 1e6:.1f} um (disk coherence function {airy * 1e6:.1f} um)")
    slope = np.polyfit(np.log([r["source_radius"] for r in widths]), np.log([r["hwhm"] for r in widths]), 1)[0]
    print(f"log-log slope of width vs radius: {slope:.3f}")

    path = args.out_dir / "lensless_scaling.json"
    path.write_text(json.dumps({"setup": setup.to_dict(), "scaling": scaling, "widths": widths,
                                "width_slope": slope}, indent=1))
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
