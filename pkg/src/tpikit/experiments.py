"""End-to-end benchmark runs.

Glues the pieces together for one configured experiment: build the grids and
initial data, plan the step ladder, integrate, and leave a directory of
plain CSV files plus a manifest behind.  The density initial profiles all
advect at unit speed in the stiff limit, so the reference solution for the
error report is just the initial profile shifted by t.
"""

import csv
import json
import os
import time
from dataclasses import dataclass

import numpy as np

from .config import ExperimentConfig, collision_model
from .integrators import BlowUpError, IntegrationResult, integrate
from .maxwellian import density
from .quadrature import gauss_hermite_1d, gauss_hermite_2d
from .spatial import SpaceGrid1D, SpaceGrid2D
from .spectrum import SpectrumReport, full_spectrum
from .system import equilibrium_state, make_rhs
from .tpi_params import (
    InfeasibleScheduleError,
    TpiSchedule,
    select_clustered,
    select_zero_one_stable,
)

FLOAT_FMT = "%.17g"


def _density_profile(name):
    """Vectorized density profile on [0, 1) (or the unit square) by name."""
    if name == "step_profile_1d":
        def profile(x):
            x = np.asarray(x)
            out = np.full_like(x, 0.1, dtype=float)
            out[(x >= 0.2) & (x < 0.4)] = 1.0
            out[(x >= 0.6) & (x < 0.8)] = 0.5
            return out
        return profile
    if name == "gaussian_1d":
        return lambda x: np.exp(-100.0 * (np.asarray(x) - 0.5) ** 2)
    if name == "gaussian_2d":
        def profile(x, y):
            x = np.asarray(x)
            y = np.asarray(y)
            return np.exp(-100.0 * ((x[:, None] - 0.5) ** 2 + (y[None, :] - 0.5) ** 2))
        return profile
    if name.startswith("table:"):
        path = name[len("table:"):]
        rows = np.loadtxt(path, delimiter=",", ndmin=2)
        xs, vals = rows[:, 0], rows[:, 1]
        order = np.argsort(xs)
        xs, vals = xs[order], vals[order]
        # pad one period on both sides so interpolation wraps
        xp = np.concatenate([xs - 1.0, xs, xs + 1.0])
        vp = np.concatenate([vals, vals, vals])
        return lambda x: np.interp(np.asarray(x), xp, vp)
    raise ValueError(f"unknown initial density {name!r}")


def initial_density(cfg: ExperimentConfig, sgrid):
    profile = _density_profile(cfg.initial_density)
    if isinstance(sgrid, SpaceGrid2D):
        return profile(sgrid.centers_x, sgrid.centers_y)
    return profile(sgrid.centers)


def exact_density(cfg: ExperimentConfig, sgrid, t: float):
    """Initial profile advected by t at unit speed with periodic wrap."""
    profile = _density_profile(cfg.initial_density)
    if isinstance(sgrid, SpaceGrid2D):
        return profile((sgrid.centers_x - t) % 1.0, (sgrid.centers_y - t) % 1.0)
    return profile((sgrid.centers - t) % 1.0)


@dataclass(frozen=True)
class ErrorReport:
    l1: float
    l2: float
    linf: float
    rho_min: float
    rho_max: float
    mass_initial: float
    mass_final: float
    mass_drift: float


def density_errors(rho, rho_exact, cell_volume: float, mass_initial: float) -> ErrorReport:
    err = np.asarray(rho) - np.asarray(rho_exact)
    mass_final = cell_volume * float(np.sum(rho))
    return ErrorReport(
        l1=cell_volume * float(np.sum(np.abs(err))),
        l2=float(np.sqrt(cell_volume * np.sum(err * err))),
        linf=float(np.max(np.abs(err))),
        rho_min=float(np.min(rho)),
        rho_max=float(np.max(rho)),
        mass_initial=mass_initial,
        mass_final=mass_final,
        mass_drift=abs(mass_final - mass_initial) / abs(mass_initial),
    )


def build_problem(cfg: ExperimentConfig):
    """Grids, collision model and initial density for a configuration."""
    if cfg.dimension == 2:
        sgrid = SpaceGrid2D.from_spacing(cfg.dx)
        vgrid = gauss_hermite_2d(cfg.j_nodes)
    else:
        sgrid = SpaceGrid1D.from_spacing(cfg.dx)
        vgrid = gauss_hermite_1d(cfg.j_nodes)
    model = collision_model(cfg)
    rho0 = initial_density(cfg, sgrid)
    if np.any(rho0 <= 0.0):
        raise ValueError("initial density must be positive everywhere")
    return sgrid, vgrid, model, rho0


def plan_schedule(cfg: ExperimentConfig, problem=None):
    """Build the step ladder a configuration asks for.

    Returns (schedule, spectrum_report, planner_info); the report and info
    are None in zero_one mode, which needs no eigenvalue sweep.
    """
    if problem is None:
        problem = build_problem(cfg)
    sgrid, vgrid, model, rho0 = problem
    if cfg.tpi_mode == "clustered":
        report = full_spectrum(model, cfg.eps, sgrid, vgrid, cfg.scheme, rho0=rho0)
        schedule, info = select_clustered(report, m_min=cfg.m_min, outer=cfg.outer,
                                          k_max=cfg.k_max)
        return schedule, report, info
    h_last = cfg.h_last_over_dx * cfg.dx
    schedule = select_zero_one_stable(
        cfg.eps, cfg.k_inner, h_last, cfg.dx,
        rho_max=float(np.max(rho0)), h0=cfg.h0, outer=cfg.outer,
    )
    return schedule, None, None


def write_atomic(path, text: str):
    """Write text then rename into place, so readers never see a torn file."""
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def _snapshot_csv(path, sgrid, rho):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if isinstance(sgrid, SpaceGrid2D):
            writer.writerow(["x", "y", "rho"])
            xs, ys = sgrid.centers_x, sgrid.centers_y
            for i in range(sgrid.n_x):
                for j in range(sgrid.n_y):
                    writer.writerow([FLOAT_FMT % xs[i], FLOAT_FMT % ys[j],
                                     FLOAT_FMT % rho[i, j]])
        else:
            writer.writerow(["x", "rho"])
            for x, r in zip(sgrid.centers, rho):
                writer.writerow([FLOAT_FMT % x, FLOAT_FMT % r])


def _observables_csv(path, times, observables, names):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", *names])
        for t, row in zip(times, observables):
            writer.writerow([FLOAT_FMT % t, *(FLOAT_FMT % v for v in row)])


def _errors_csv(path, report: ErrorReport):
    from dataclasses import asdict

    data = asdict(report)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(data.keys()))
        writer.writerow([FLOAT_FMT % v for v in data.values()])


@dataclass
class RunResult:
    config: ExperimentConfig
    schedule: TpiSchedule
    integration: IntegrationResult
    errors: ErrorReport
    out_dir: str
    files: tuple
    spectrum: SpectrumReport | None = None


def run_experiment(cfg: ExperimentConfig, out_dir) -> RunResult:
    """Run one configured experiment and write its output directory.

    The manifest is written last and atomically, and it is written even when
    planning or stepping fails, with the failure recorded, so a crashed run
    still explains itself.
    """
    os.makedirs(out_dir, exist_ok=True)
    manifest = {
        "tool": "tpikit",
        "outcome": "incomplete",
        "config": cfg.to_dict(),
        "versions": _versions(),
    }
    files = []
    t_wall = time.perf_counter()
    try:
        problem = build_problem(cfg)
        sgrid, vgrid, model, rho0 = problem
        t_plan = time.perf_counter()
        schedule, report, info = plan_schedule(cfg, problem)
        manifest["schedule"] = json.loads(schedule.to_json())
        manifest["timing_seconds"] = {"plan": time.perf_counter() - t_plan}
        schedule.save(os.path.join(out_dir, "schedule.json"))
        files.append("schedule.json")

        cell_volume = sgrid.dx * sgrid.dy if cfg.dimension == 2 else sgrid.dx
        f0 = equilibrium_state(rho0, vgrid)
        rhs = make_rhs(model, cfg.eps, sgrid, vgrid, cfg.scheme)

        def probe(f):
            rho = density(f, vgrid)
            return (float(rho.min()), float(rho.max()),
                    cell_volume * float(rho.sum()))

        t_int = time.perf_counter()
        result = integrate(f0, rhs, schedule, cfg.t_end, probe=probe,
                           probe_names=("rho_min", "rho_max", "mass"),
                           n_snapshots=cfg.snapshots)
        manifest["timing_seconds"]["integrate"] = time.perf_counter() - t_int

        for idx, (t, f) in enumerate(zip(result.snapshot_times, result.snapshots)):
            name = f"snapshot_{idx:03d}.csv"
            _snapshot_csv(os.path.join(out_dir, name), sgrid, density(f, vgrid))
            files.append(name)
        _observables_csv(os.path.join(out_dir, "observables.csv"), result.times,
                         result.observables, result.probe_names)
        files.append("observables.csv")

        rho_end = density(result.final, vgrid)
        mass0 = cell_volume * float(np.sum(rho0))
        errors = density_errors(rho_end, exact_density(cfg, sgrid, cfg.t_end),
                                cell_volume, mass0)
        _errors_csv(os.path.join(out_dir, "errors.csv"), errors)
        files.append("errors.csv")

        manifest["errors"] = {k: getattr(errors, k) for k in (
            "l1", "l2", "linf", "rho_min", "rho_max", "mass_initial",
            "mass_final", "mass_drift")}
        manifest["outcome"] = "ok"
        manifest["files"] = files
        manifest["timing_seconds"]["total"] = time.perf_counter() - t_wall
        write_atomic(os.path.join(out_dir, "manifest.json"),
                     json.dumps(manifest, indent=2) + "\n")
        return RunResult(config=cfg, schedule=schedule, integration=result,
                         errors=errors, out_dir=str(out_dir),
                         files=tuple(files + ["manifest.json"]),
                         spectrum=report)
    except BlowUpError as exc:
        manifest["outcome"] = "blow_up"
        manifest["error"] = str(exc)
        manifest["files"] = files
        manifest["timing_seconds"] = {"total": time.perf_counter() - t_wall}
        write_atomic(os.path.join(out_dir, "manifest.json"),
                     json.dumps(manifest, indent=2) + "\n")
        raise
    except InfeasibleScheduleError as exc:
        manifest["outcome"] = "infeasible"
        manifest["error"] = str(exc)
        manifest["files"] = files
        manifest["timing_seconds"] = {"total": time.perf_counter() - t_wall}
        write_atomic(os.path.join(out_dir, "manifest.json"),
                     json.dumps(manifest, indent=2) + "\n")
        raise
    except Exception as exc:
        manifest["outcome"] = "failed"
        manifest["error"] = f"{type(exc).__name__}: {exc}"
        manifest["files"] = files
        manifest["timing_seconds"] = {"total": time.perf_counter() - t_wall}
        write_atomic(os.path.join(out_dir, "manifest.json"),
                     json.dumps(manifest, indent=2) + "\n")
        raise


def _versions() -> dict:
    import importlib.metadata

    out = {}
    for dist in ("tpikit", "numpy", "scipy"):
        try:
            out[dist] = importlib.metadata.version(dist)
        except importlib.metadata.PackageNotFoundError:
            out[dist] = "unknown"
    return out
