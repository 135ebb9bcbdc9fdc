"""Command line front end.

Subcommands:
    run <config>        execute an experiment config (eps sweep) and report
    analyze <run-dir>   recompute fits on a stored artifact
    classify <file>     classify a cubic form given as coefficient JSON
    ode-suite           quick property battery for the reduced-flow modules
    report <run-dir>    human-readable summary of a stored artifact

Exit code 0 means every enabled check passed; 1 means at least one
failed; 2 means the invocation itself was unusable.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
from pathlib import Path

import numpy as np

from .artifacts import RunArtifact, emit_series
from .config import parse_config
from .errors import CubicwaveError
from .nonlinearity import CubicNonlinearity, classify
from .runner import analyze_artifact, run_experiment

__all__ = ["main"]


def _print_fit_lines(name: str, artifact: RunArtifact) -> None:
    expected = "BLOWUP" if artifact.config.expect == "blowup" else "COMPLETED"
    tag = "PASS" if artifact.status == expected else "FAIL"
    extra = ""
    if artifact.status == "BLOWUP":
        extra = f" (blow-up at t = {artifact.meta.get('blowup_time'):.4g})"
    print(f"[{tag}] {name}: status {artifact.status}, expected {expected}{extra}")
    for fit_name, fit in sorted(artifact.fits.items()):
        verdict = "PASS" if fit.passed else "FAIL"
        slope = fit.params.get("slope")
        slope_txt = f" slope={slope:.4f}" if isinstance(slope, float) and np.isfinite(slope) else ""
        print(
            f"[{verdict}] {name}/{fit_name}:{slope_txt}"
            f" window=[{fit.window[0]:.4g}, {fit.window[1]:.4g}] {fit.note}"
        )
    for skipped, why in artifact.meta.get("skipped_fits", {}).items():
        print(f"[SKIP] {name}/{skipped}: {why}")


def cmd_run(args) -> int:
    config = parse_config(Path(args.config).read_text())
    if args.out:
        config = dataclasses.replace(config, out=args.out)
    threads = 1 if args.deterministic else max(args.threads, 1)
    artifacts = run_experiment(config, threads=threads)
    ok = True
    for artifact in artifacts:
        _print_fit_lines(config.run_name(artifact.eps), artifact)
        ok = ok and artifact.passed
    if config.out:
        for artifact in artifacts:
            run_dir = Path(config.out) / config.run_name(artifact.eps)
            emit_series(artifact, "all", run_dir / "series")
            print(f"[INFO] artifact written to {run_dir}")
    return 0 if ok else 1


def cmd_analyze(args) -> int:
    artifact = analyze_artifact(args.run_dir, save=not args.no_save)
    _print_fit_lines(Path(args.run_dir).name, artifact)
    return 0 if artifact.passed else 1


def cmd_classify(args) -> int:
    f = CubicNonlinearity.from_json(Path(args.file).read_text())
    cls = classify(f)
    print(f"[INFO] classification of {args.file}:")
    print(f"  null condition        : {cls.satisfies_null_condition}")
    print(f"  agemi (Re trace >= 0) : {cls.satisfies_agemi}")
    print(f"  strictly dissipative  : {cls.strictly_dissipative}")
    print(f"  purely rotational     : {cls.purely_rotational}")
    print(f"  c0 = min Re trace     : {cls.c0:.12g}")
    return 0


def cmd_ode_suite(args) -> int:
    from .char_ode import (
        extract_profile,
        power_forced_preset,
        solve_xi_eta,
        solve_z,
        verify_asymptotic_bound,
    )
    from .profile_ode import (
        ProfileParams,
        explicit_profile,
        integrate_profile_batch,
        phase_theta,
    )

    rng = np.random.default_rng(args.seed)
    ok = True

    f_hats, p0s, taus = [], [], []
    for _ in range(50):
        f_hat = complex(rng.uniform(0.0, 2.0), rng.uniform(-2.0, 2.0))
        if abs(f_hat) > 2.0:
            f_hat *= 2.0 / abs(f_hat)
        f_hats.append(f_hat)
        p0s.append(complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) / np.sqrt(2.0))
        taus.append(float(rng.uniform(0.0, 100.0)))
    got = integrate_profile_batch(f_hats, p0s, taus, dt=1e-3)
    exact = np.array(
        [explicit_profile(ProfileParams(f, p), tau) for f, p, tau in zip(f_hats, p0s, taus)]
    )
    worst = float(np.max(np.abs(got - exact)))
    line = "PASS" if worst <= 1e-7 else "FAIL"
    ok &= worst <= 1e-7
    print(f"[{line}] reduced-flow integrator vs closed form: max |diff| = {worst:.3e} (tol 1e-07)")

    worst = 0.0
    from scipy.integrate import quad

    for _ in range(25):
        f_hat = complex(rng.uniform(0.05, 2.0), rng.uniform(-2.0, 2.0))
        p0_abs = float(rng.uniform(0.05, 1.0))
        tau = float(rng.uniform(0.1, 50.0))
        params = ProfileParams(f_hat, p0_abs)

        def integrand(s):
            return 0.5 * f_hat.imag * p0_abs**2 / (1.0 + f_hat.real * p0_abs**2 * s)

        val, _err = quad(integrand, 0.0, tau, limit=200)
        worst = max(worst, abs(phase_theta(params, tau) - val))
    line = "PASS" if worst <= 1e-9 else "FAIL"
    ok &= worst <= 1e-9
    print(f"[{line}] phase closed form vs quadrature: max |diff| = {worst:.3e} (tol 1e-09)")

    worst = 0.0
    for _ in range(10):
        prob = power_forced_preset(eps=float(rng.uniform(0.004, 0.02)))
        traj = solve_z(prob, 1e4, dt=2e-3)
        comp = solve_xi_eta(prob, 1e4, dt=2e-3)
        worst = max(worst, float(np.max(np.abs(traj.z - comp.z_reconstructed))))
    line = "PASS" if worst <= 1e-7 else "FAIL"
    ok &= worst <= 1e-7
    print(f"[{line}] damping-factor reconstruction: max |diff| = {worst:.3e} (tol 1e-07)")

    prob = power_forced_preset()
    profile = extract_profile(prob)
    fit = verify_asymptotic_bound(prob, profile, np.geomspace(1e2, 1e6, 25))
    slope = fit.params.get("slope", float("nan"))
    line = "PASS" if fit.passed else "FAIL"
    ok &= fit.passed
    print(
        f"[{line}] forced-decay profile extraction: residual slope {slope:.4f}"
        f" (target <= {fit.params.get('target', float('nan')) + 0.05:.4f})"
    )
    return 0 if ok else 1


def cmd_report(args) -> int:
    artifact = RunArtifact.load(args.run_dir)
    meta = artifact.meta
    print(f"[INFO] artifact {args.run_dir}")
    print(f"  preset    : {artifact.config.preset} (mode {artifact.config.mode})")
    print(f"  eps       : {artifact.eps:g}, t_end {artifact.config.t_end:g}")
    print(f"  status    : {artifact.status}")
    cls = meta.get("classification", {})
    if cls:
        print(
            "  class     : null={null_condition} agemi={agemi} dissipative={strictly_dissipative}"
            " rotational={purely_rotational} c0={c0:.6g}".format(**cls)
        )
    if "blowup_time" in meta:
        print(f"  blow-up at: t = {meta['blowup_time']:.6g}")
    if "runtime_s" in meta:
        print(f"  runtime   : {meta['runtime_s']} s over {meta.get('steps')} steps")
    for name, info in meta.get("p0_fits", {}).items():
        p0 = complex(info["p0"][0], info["p0"][1])
        print(
            f"  P0[{name}] : {p0:.6g} (|P0| = {abs(p0):.6g},"
            f" t_match spread {info['t_match_spread']:.2e})"
        )
    if "freeness" in meta:
        free = meta["freeness"]
        print(
            f"  freeness  : asymptotically_free={free['asymptotically_free']}"
            f" |P0|_L2={free['p0_l2_norm']:.6g} drift={free['phase_drift_max']:.3e}"
        )
    for fit_name, fit in sorted(artifact.fits.items()):
        verdict = "PASS" if fit.passed else "FAIL"
        print(f"  [{verdict}] {fit_name}: {json.dumps(fit.params, sort_keys=True, default=str)}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cubicwave",
        description="Desk-scale laboratory for cubic derivative wave equations in 2D.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config", help="path to a key=value config file")
    p_run.add_argument("--out", default="", help="artifact output directory (overrides config)")
    p_run.add_argument("--threads", type=int, default=1, help="eps-sweep worker threads")
    p_run.add_argument(
        "--deterministic", action="store_true", help="single-threaded reference mode"
    )
    p_run.set_defaults(func=cmd_run)

    p_an = sub.add_parser("analyze", help="recompute fits on a stored artifact")
    p_an.add_argument("run_dir")
    p_an.add_argument("--no-save", action="store_true", help="do not rewrite fits/")
    p_an.set_defaults(func=cmd_analyze)

    p_cl = sub.add_parser("classify", help="classify a cubic form from coefficient JSON")
    p_cl.add_argument("file")
    p_cl.set_defaults(func=cmd_classify)

    p_ode = sub.add_parser("ode-suite", help="reduced-flow property battery")
    p_ode.add_argument("--seed", type=int, default=0)
    p_ode.set_defaults(func=cmd_ode_suite)

    p_rep = sub.add_parser("report", help="summarize a stored artifact")
    p_rep.add_argument("run_dir")
    p_rep.set_defaults(func=cmd_report)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CubicwaveError as exc:
        print(f"[ERROR] {type(exc).__name__}: {exc}")
        return 2
    except FileNotFoundError as exc:
        print(f"[ERROR] {exc}")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
