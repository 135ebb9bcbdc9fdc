"""Long-horizon dissipative run: energy decay, pointwise decay, ray conformance.

This is the headline experiment.  At the default settings it marches the
radial solver to t = 1e4 at dr = 1/12 (about 120k steps on 120k cells), then
fits every enabled decay law.  Expect a few minutes of wall time.
"""

import argparse
import time
from pathlib import Path

from cubicwave import preset_config
from cubicwave.runner import run_single


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eps", type=float, default=0.3)
    ap.add_argument("--t-end", type=float, default=1.0e4)
    ap.add_argument("--dr-inverse", type=int, default=12, help="cells per unit radius")
    ap.add_argument("--out", default="runs/decay_study")
    args = ap.parse_args()

    n_r = int(round((args.t_end + 8.0) * args.dr_inverse)) + 4
    config = preset_config(
        "dissipative", n_r=n_r, r_max=n_r / args.dr_inverse, t_end=args.t_end
    )
    print(f"[INFO] grid: {n_r} cells to r = {config.r_max:.1f}, horizon t = {args.t_end:g}")
    start = time.perf_counter()
    artifact = run_single(config, args.eps)
    print(f"[INFO] run finished: {artifact.status} in {time.perf_counter() - start:.1f} s")

    e = artifact.energy.energy_sq
    print(f"[INFO] energy: {e[0]:.6g} -> {e[-1]:.6g} ({e[-1] / e[0]:.3f} of start)")
    for name, fit in sorted(artifact.fits.items()):
        tag = "PASS" if fit.passed else "FAIL"
        print(f"[{tag}] {name}: slope={fit.params.get('slope')} window={fit.window}")
    for name, why in artifact.meta.get("skipped_fits", {}).items():
        print(f"[SKIP] {name}: {why}")

    out = Path(args.out)
    artifact.save(out)
    print(f"[INFO] artifact saved to {out}")
    return 0 if artifact.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
