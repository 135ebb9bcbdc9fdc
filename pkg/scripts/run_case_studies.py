"""Quick tour: classify the four stock cubic forms and run each preset briefly.

Short horizons throughout; this is the smoke-level demonstration that the
classification table and the qualitative run outcomes line up.  For real
decay fits use run_decay_study.py.
"""

import argparse

from cubicwave import classify, preset_config, preset_names
from cubicwave.runner import build_nonlinearity, run_single

SHORT = {"t_end": 20.0, "n_r": 420, "r_max": 35.0}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eps", type=float, default=0.3)
    args = ap.parse_args()

    names = [n for n in sorted(preset_names()) if "-" not in n or n == "null-form-a"]
    print("[INFO] classification table")
    for name in names:
        cls = classify(build_nonlinearity(preset_config(name)))
        print(
            f"  {name:<16} null={cls.satisfies_null_condition!s:<5}"
            f" agemi={cls.satisfies_agemi!s:<5}"
            f" dissipative={cls.strictly_dissipative!s:<5}"
            f" rotational={cls.purely_rotational!s:<5} c0={cls.c0:+.3f}"
        )

    print("[INFO] short runs")
    ok = True
    for name in names:
        eps = args.eps
        overrides = dict(SHORT)
        if name == "antidissipative":
            eps = 0.5
            overrides = {}  # keep the blow-up preset as shipped
        artifact = run_single(preset_config(name, **overrides), eps)
        expected = "BLOWUP" if artifact.config.expect == "blowup" else "COMPLETED"
        good = artifact.status == expected
        ok = ok and good
        print(f"  [{'PASS' if good else 'FAIL'}] {name:<16} {artifact.status}")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
