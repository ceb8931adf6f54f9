import json

import numpy as np
import pytest

from tpikit import (
    BlowUpError,
    ExperimentConfig,
    InfeasibleScheduleError,
    SpaceGrid1D,
    build_problem,
    density_errors,
    exact_density,
    initial_density,
    plan_schedule,
    run_experiment,
)
from tpikit.experiments import write_atomic


def make_cfg(**overrides):
    base = dict(dx=0.05, eps=0.025 / 36.0, initial_density="step_profile_1d",
                tpi_mode="zero_one", k_inner=2, h_last_over_dx=0.5,
                t_end=0.5, snapshots=2)
    base.update(overrides)
    return ExperimentConfig(**base)


def test_step_profile_values_half_open():
    cfg = make_cfg(dx=0.01)
    grid = SpaceGrid1D.from_spacing(0.01)
    rho = initial_density(cfg, grid)
    x = grid.centers

    def at(xv):
        return rho[np.argmin(np.abs(x - xv))]

    assert at(0.25) == 1.0
    assert at(0.65) == 0.5
    assert at(0.05) == 0.1
    assert at(0.5) == 0.1
    # half-open on the right: the cell at 0.395 is inside, 0.405 outside
    assert at(0.395) == 1.0
    assert at(0.405) == 0.1


def test_gaussian_profiles_peak_at_one():
    grid = SpaceGrid1D.from_spacing(0.04)  # odd cell count puts 0.5 on a center
    cfg = make_cfg(dx=0.04, initial_density="gaussian_1d")
    rho = initial_density(cfg, grid)
    assert rho.max() == pytest.approx(1.0)
    assert grid.centers[np.argmax(rho)] == pytest.approx(0.5)
    cfg2 = make_cfg(dx=0.04, dimension=2, initial_density="gaussian_2d")
    sgrid, vgrid, model, rho2 = build_problem(cfg2)
    assert rho2.shape == (25, 25)
    assert rho2.max() == pytest.approx(1.0)
    assert rho2[12, 12] == rho2.max()


def test_table_profile_round_trip_and_wrap(tmp_path):
    path = tmp_path / "profile.csv"
    xs = np.array([0.125, 0.375, 0.625, 0.875])
    vals = np.array([0.4, 1.2, 0.7, 0.9])
    path.write_text("".join(f"{x},{v}\n" for x, v in zip(xs, vals)))
    cfg = make_cfg(dx=0.05, initial_density=f"table:{path}")
    grid = SpaceGrid1D.from_spacing(0.05)
    rho = initial_density(cfg, grid)
    # these knots fall on cell centers, so their table values come back
    assert rho[np.argmin(np.abs(grid.centers - 0.375))] == pytest.approx(1.2)
    assert rho[np.argmin(np.abs(grid.centers - 0.875))] == pytest.approx(0.9)
    # interpolation wraps around the period: the center at 0.975 sits
    # between the knots 0.875 and 0.125 + 1
    expected = np.interp(0.975, [0.875, 1.125], [0.9, 0.4])
    assert rho[np.argmin(np.abs(grid.centers - 0.975))] == pytest.approx(expected)


def test_exact_density_is_shifted_initial():
    cfg = make_cfg(dx=0.01)
    grid = SpaceGrid1D.from_spacing(0.01)
    rho0 = initial_density(cfg, grid)
    moved = exact_density(cfg, grid, 0.25)
    np.testing.assert_allclose(moved, np.roll(rho0, 25))
    # a full period returns the initial data exactly
    np.testing.assert_allclose(exact_density(cfg, grid, 1.0), rho0)


def test_density_errors_hand_values():
    report = density_errors(np.array([1.0, 2.0]), np.array([1.0, 1.0]),
                            cell_volume=0.5, mass_initial=1.5)
    assert report.l1 == pytest.approx(0.5)
    assert report.l2 == pytest.approx(np.sqrt(0.5))
    assert report.linf == pytest.approx(1.0)
    assert report.rho_min == 1.0
    assert report.rho_max == 2.0
    assert report.mass_final == pytest.approx(1.5)
    assert report.mass_drift == pytest.approx(0.0)


def test_build_problem_shapes_and_positivity(tmp_path):
    sgrid, vgrid, model, rho0 = build_problem(make_cfg(dx=0.02))
    assert sgrid.n_cells == 50
    assert vgrid.size == 10
    assert rho0.shape == (50,)
    bad = tmp_path / "dips_negative.csv"
    bad.write_text("0.25,-1.0\n0.75,1.0\n")
    with pytest.raises(ValueError, match="positive"):
        build_problem(make_cfg(initial_density=f"table:{bad}"))


def test_plan_schedule_zero_one_h0_rules():
    cfg = make_cfg()
    schedule, report, info = plan_schedule(cfg)
    assert report is None and info is None
    # h0 = eps / max initial density; the step profile peaks at 1
    assert schedule.h0 == pytest.approx(cfg.eps)
    assert schedule.m == (pytest.approx(3.0), pytest.approx(3.0))
    # an explicit h0 overrides the density-based default; eps/6 keeps the
    # step ratio a power of the inner multiplier so the ladder still closes
    override = make_cfg(h0=cfg.eps / 6.0)
    sched2, _, _ = plan_schedule(override)
    assert sched2.h0 == pytest.approx(cfg.eps / 6.0)
    assert len(sched2.m) == 3


def test_plan_schedule_clustered_returns_diagnostics():
    cfg = make_cfg(dx=0.01, eps=1e-5, tpi_mode="clustered",
                   collision="profile", omega_breakpoints=(0.5, 1.0),
                   omega_values=(1.0, 0.1), initial_density="gaussian_1d")
    schedule, report, info = plan_schedule(cfg)
    assert schedule.method == "clustered"
    assert report is not None and info is not None
    assert report.rates == (1.0, 0.1)
    assert schedule.m[0] == pytest.approx(9.0, abs=5e-4)


def test_run_experiment_ok_writes_everything(tmp_path):
    cfg = make_cfg()
    out = tmp_path / "run"
    result = run_experiment(cfg, out)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["outcome"] == "ok"
    assert manifest["schedule"]["M"] == [pytest.approx(3.0), pytest.approx(3.0)]
    assert "plan" in manifest["timing_seconds"]
    for name in ("schedule.json", "observables.csv", "errors.csv",
                 "snapshot_000.csv", "snapshot_001.csv", "snapshot_002.csv"):
        assert (out / name).exists(), name
        assert name in manifest["files"]
    header = (out / "observables.csv").read_text().splitlines()[0]
    assert header == "t,rho_min,rho_max,mass"
    snap_header = (out / "snapshot_000.csv").read_text().splitlines()[0]
    assert snap_header == "x,rho"
    # the relaxation limit advects the profile; mass cannot drift
    assert result.errors.mass_drift < 1e-12
    assert manifest["errors"]["mass_drift"] < 1e-12
    assert result.integration.n_steps == 20


def test_run_experiment_deterministic_outputs(tmp_path):
    cfg = make_cfg()
    run_experiment(cfg, tmp_path / "a")
    run_experiment(cfg, tmp_path / "b")
    for name in ("observables.csv", "errors.csv", "snapshot_002.csv"):
        assert (tmp_path / "a" / name).read_bytes() == \
            (tmp_path / "b" / name).read_bytes()


def test_run_experiment_infeasible_manifest(tmp_path):
    # ratio 25 falls between what one level can reach and what two levels
    # at the floor need, so planning fails before any stepping
    cfg = make_cfg(dx=0.005, eps=1e-4, k_inner=5)
    out = tmp_path / "run"
    with pytest.raises(InfeasibleScheduleError):
        run_experiment(cfg, out)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["outcome"] == "infeasible"
    assert "error" in manifest
    assert not (out / "schedule.json").exists()


def test_run_experiment_blow_up_manifest(tmp_path):
    # inner step ten times the relaxation scale: the collision modes get a
    # multiplier of -9 and the run must abort with a diagnosable manifest
    cfg = make_cfg(dx=0.1, eps=1e-4, j_nodes=4, k_inner=3,
                   h_last_over_dx=0.4, h0=1e-3, t_end=4.0, snapshots=0)
    out = tmp_path / "run"
    with pytest.raises(BlowUpError):
        run_experiment(cfg, out)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["outcome"] == "blow_up"
    assert "blew up" in manifest["error"]
    assert (out / "schedule.json").exists()


def test_write_atomic_replaces(tmp_path):
    path = tmp_path / "file.json"
    write_atomic(path, "first\n")
    write_atomic(path, "second\n")
    assert path.read_text() == "second\n"
    assert not (tmp_path / "file.json.tmp").exists()
