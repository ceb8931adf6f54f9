"""Command line entry points.

Subcommands mirror the pipeline: ``spectrum`` sweeps eigenvalues, ``plan``
builds a step ladder, ``run`` executes an experiment, ``verify`` checks a
ladder against the computed spectrum, and ``sweep`` replans across a list
of stiffness values.  Exit codes: 0 on success, 1 when verify finds an
unstable mode, 2 for configuration errors, 3 when no feasible schedule
exists, 4 when the integration blows up.

The default output root is $TPIKIT_OUT, falling back to ./runs.
"""

import argparse
import csv
import dataclasses
import os
import sys

from .config import ConfigError, load_config
from .experiments import FLOAT_FMT, build_problem, plan_schedule, run_experiment
from .integrators import BlowUpError
from .spectrum import containment_check, full_spectrum, spectrum_to_csv
from .tpi_params import InfeasibleScheduleError, TpiSchedule, verify_stability

OUT_ROOT_ENV = "TPIKIT_OUT"


def _out_dir(args, cfg, command: str) -> str:
    if args.out:
        return args.out
    if cfg.out_dir:
        return cfg.out_dir
    root = os.environ.get(OUT_ROOT_ENV, "runs")
    stem = os.path.splitext(os.path.basename(args.config))[0]
    return os.path.join(root, f"{stem}-{command}")


def _load(args):
    cfg = load_config(args.config)
    if args.verbose:
        print(f"config: {args.config}")
    return cfg


def _spectrum_for(cfg):
    if cfg.dimension != 1:
        raise ConfigError("spectrum analysis is one-dimensional")
    sgrid, vgrid, model, rho0 = build_problem(cfg)
    return full_spectrum(model, cfg.eps, sgrid, vgrid, cfg.scheme, rho0=rho0)


def cmd_spectrum(args) -> int:
    cfg = _load(args)
    report = _spectrum_for(cfg)
    out = _out_dir(args, cfg, "spectrum")
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, "spectrum.csv")
    spectrum_to_csv(report, path)
    contain = containment_check(report)
    print(f"modes: {report.n_modes}   velocity nodes per mode: "
          f"{report.eigenvalues.shape[2]}")
    print(f"fast spectral radius R_f = {report.fast_radius:.5f}")
    print(f"slow branch: min Re = {report.dominant.real.min():.6f}")
    for i, disk in enumerate(report.clusters):
        print(f"  cluster {i}: rate {disk.rate:g}  center {disk.center:.6g}  "
              f"kind {disk.kind}")
    if report.gap_ratios:
        gaps = "  ".join(f"{g:.3g}" for g in report.gap_ratios)
        print(f"center gap ratios: {gaps}")
    status = "yes" if contain.all_contained else "NO"
    print(f"fast eigenvalues contained in cluster disks: {status} "
          f"(worst excess {contain.worst_excess:.3e}, {contain.n_checked} checked)")
    print(f"wrote {path}")
    return 0


def cmd_plan(args) -> int:
    cfg = _load(args)
    schedule, report, info = plan_schedule(cfg)
    print(schedule.describe())
    if args.verbose and info is not None:
        print(f"dominant-branch M cap: {info.m_dominant:.4f}")
        print(f"extra-slow M cap: {info.m_extra_slow:.4f}")
        for i, grp in enumerate(info.groups):
            pretty = ", ".join(f"{c:.4g}" for c in grp)
            print(f"level {i} cluster centers: {pretty}")
    out = _out_dir(args, cfg, "plan")
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, "schedule.json")
    schedule.save(path)
    print(f"wrote {path}")
    return 0


def cmd_run(args) -> int:
    cfg = _load(args)
    out = _out_dir(args, cfg, "run")
    result = run_experiment(cfg, out)
    print(result.schedule.describe())
    print(f"outer steps: {result.integration.n_steps}   "
          f"rhs evaluations: {result.integration.rhs_evaluations}")
    err = result.errors
    print(f"density error vs advected profile:  L1 {err.l1:.6e}   "
          f"L2 {err.l2:.6e}   Linf {err.linf:.6e}")
    print(f"density range [{err.rho_min:.6f}, {err.rho_max:.6f}]   "
          f"relative mass drift {err.mass_drift:.3e}")
    print(f"outputs in {result.out_dir}: {', '.join(result.files)}")
    return 0


def cmd_verify(args) -> int:
    cfg = _load(args)
    report = _spectrum_for(cfg)
    if args.schedule:
        try:
            schedule = TpiSchedule.load(args.schedule)
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"bad schedule file {args.schedule}: {exc}") from None
    else:
        schedule, _, _ = plan_schedule(cfg)
    check = verify_stability(schedule, report, tol=args.tol)
    print(schedule.describe())
    print(f"checked {check.n_checked} eigenvalues: max |amplification| = "
          f"{check.max_amplification:.12f}")
    if check.stable:
        print("stable: yes")
        return 0
    print("stable: NO")
    for idx, amp in check.violations:
        print(f"  violation at eigenvalue {idx}: |amplification| = {amp:.6f}")
    return 1


def cmd_sweep(args) -> int:
    cfg = _load(args)
    try:
        eps_values = [float(tok) for tok in args.eps.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --eps list: {exc}") from None
    if not eps_values:
        raise ConfigError("--eps needs at least one value")
    out = _out_dir(args, cfg, "sweep")
    os.makedirs(out, exist_ok=True)
    rows = []
    for eps in eps_values:
        sub = dataclasses.replace(cfg, eps=eps)
        schedule, _, _ = plan_schedule(sub)
        rows.append((eps, schedule))
        ms = " ".join(f"{m:.4f}" for m in schedule.m)
        ks = " ".join(str(k) for k in schedule.k)
        print(f"eps {eps:.3e}: levels {schedule.levels}  CFL {schedule.cfl:.4f}  "
              f"M [{ms}]  K [{ks}]")
    path = os.path.join(out, "sweep.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["eps", "levels", "h0", "h_last", "cfl", "m_values",
                         "k_values"])
        for eps, schedule in rows:
            writer.writerow([
                FLOAT_FMT % eps, schedule.levels, FLOAT_FMT % schedule.h0,
                FLOAT_FMT % schedule.h_last, FLOAT_FMT % schedule.cfl,
                ";".join(FLOAT_FMT % m for m in schedule.m),
                ";".join(str(k) for k in schedule.k),
            ])
    print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tpikit",
        description="Telescopic projective integration for stiff relaxation equations",
    )
    parser.add_argument("--threads", type=int, default=None,
                        help="cap BLAS/OpenMP threads (best effort)")
    parser.add_argument("--verbose", action="store_true",
                        help="print planner diagnostics")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="run configuration file")
        p.add_argument("--out", default=None, help="output directory")
        p.set_defaults(func=func)
        return p

    add("spectrum", cmd_spectrum, "sweep eigenvalues of every spatial mode")
    add("plan", cmd_plan, "build a telescopic step schedule")
    add("run", cmd_run, "run the configured experiment end to end")
    p_verify = add("verify", cmd_verify, "check a schedule against the spectrum")
    p_verify.add_argument("--schedule", default=None,
                          help="schedule JSON to verify (default: replan)")
    p_verify.add_argument("--tol", type=float, default=1e-9,
                          help="amplification tolerance above one")
    p_sweep = add("sweep", cmd_sweep, "replan across a list of eps values")
    p_sweep.add_argument("--eps", required=True,
                         help="comma-separated stiffness values")
    return parser


def _cap_threads(n: int):
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ[var] = str(n)
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(n)
    except ImportError:
        pass


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None:
        if args.threads < 1:
            print("error: --threads must be at least 1", file=sys.stderr)
            return 2
        _cap_threads(args.threads)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleScheduleError as exc:
        print(f"no feasible schedule: {exc}", file=sys.stderr)
        return 3
    except BlowUpError as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
