"""Telescopic projective time stepping.

Level zero is the forward Euler inner integrator with step h0.  Each level
above runs K+1 steps of the level below, estimates the local slope from the
last two of them, and extrapolates forward by M further steps.  The
outermost level can replace plain extrapolation with a projective
Runge-Kutta method that reuses the same slope estimates as stage
derivatives.
"""

from dataclasses import dataclass, field

import numpy as np

from .tpi_params import TpiSchedule


@dataclass(frozen=True)
class ButcherTableau:
    """Explicit tableau with the invariants the projective stages rely on."""

    a: tuple
    b: tuple
    c: tuple

    def __post_init__(self):
        stages = len(self.b)
        if len(self.a) != stages or len(self.c) != stages:
            raise ValueError("tableau arrays disagree on the stage count")
        if self.c[0] != 0.0:
            raise ValueError("first abscissa must be zero")
        if abs(sum(self.b) - 1.0) > 1e-12:
            raise ValueError("stage weights must sum to one")
        for s in range(stages):
            if len(self.a[s]) != s:
                raise ValueError("tableau must be explicit (strictly lower triangular)")
            if s >= 1:
                if abs(sum(self.a[s]) - self.c[s]) > 1e-12:
                    raise ValueError(f"row {s} of the tableau does not sum to c[{s}]")
                if self.c[s] <= 0.0:
                    raise ValueError(
                        "later abscissae must be positive; the projective stage "
                        "seed divides by them"
                    )

    @property
    def stages(self) -> int:
        return len(self.b)


RK2_MIDPOINT = ButcherTableau(a=((), (0.5,)), b=(0.0, 1.0), c=(0.0, 0.5))
RK4_CLASSIC = ButcherTableau(
    a=((), (0.5,), (0.0, 0.5), (0.0, 0.0, 1.0)),
    b=(1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0),
    c=(0.0, 0.5, 0.5, 1.0),
)
OUTER_TABLEAUX = {"prk2": RK2_MIDPOINT, "prk4": RK4_CLASSIC}


class BlowUpError(RuntimeError):
    """The solution norm left the trust region during time stepping."""

    def __init__(self, step, time, norm):
        super().__init__(
            f"solution blew up at outer step {step} (t = {time:.6g}): "
            f"max |f| = {norm:.3e}"
        )
        self.step = step
        self.time = time
        self.norm = norm


def _level_step(f, rhs, schedule, level):
    """One step of the given ladder level (level 0 is forward Euler)."""
    if level == 0:
        return f + schedule.h0 * rhs(f)
    k = schedule.k[level - 1]
    m = schedule.m[level - 1]
    cur = f
    prev = None
    for _ in range(k + 1):
        prev = cur
        cur = _level_step(cur, rhs, schedule, level - 1)
    return cur + m * (cur - prev)


def _chain(f, rhs, schedule, level, count):
    """Run ``count`` steps of a level, returning the last two states."""
    cur = f
    prev = None
    for _ in range(count):
        prev = cur
        cur = _level_step(cur, rhs, schedule, level)
    return prev, cur


def telescopic_step(f, rhs, schedule: TpiSchedule):
    """Advance one outer step h_last of the full ladder."""
    top = schedule.levels
    if schedule.outer == "pfe":
        return _level_step(f, rhs, schedule, top)
    tableau = OUTER_TABLEAUX[schedule.outer]
    k_top = schedule.k[-1]
    m_top = schedule.m[-1]
    h_in = schedule.h[-2]
    h_out = schedule.h[-1]
    f_k, f_k1 = _chain(f, rhs, schedule, top - 1, k_top + 1)
    slopes = [(f_k1 - f_k) / h_in]
    for s in range(1, tableau.stages):
        acc = None
        for m_idx, a_sm in enumerate(tableau.a[s]):
            if a_sm:
                term = a_sm * slopes[m_idx]
                acc = term if acc is None else acc + term
        if acc is None:
            acc = np.zeros_like(f)
        seed = f_k1 + (tableau.c[s] * h_out - (k_top + 1.0) * h_in) * (acc / tableau.c[s])
        g_k, g_k1 = _chain(seed, rhs, schedule, top - 1, k_top + 1)
        slopes.append((g_k1 - g_k) / h_in)
    total = None
    for b_s, slope in zip(tableau.b, slopes):
        if b_s:
            term = b_s * slope
            total = term if total is None else total + term
    return f_k1 + (m_top * h_in) * total


@dataclass
class IntegrationResult:
    times: np.ndarray
    observables: np.ndarray
    probe_names: tuple
    snapshots: list
    final: np.ndarray
    n_steps: int
    rhs_evaluations: int = 0
    snapshot_times: tuple = field(default_factory=tuple)


def integrate(f0, rhs, schedule: TpiSchedule, t_end: float, probe=None,
              probe_names=(), n_snapshots: int = 0,
              blow_up_factor: float = 1e3) -> IntegrationResult:
    """Step the state to t_end in whole outer steps.

    ``probe`` maps the state to a tuple of floats recorded after every outer
    step (and at t = 0).  ``n_snapshots`` > 0 stores that many copies of the
    full state at evenly spaced step counts, plus the initial one.  A norm
    growing past ``blow_up_factor`` times its initial value aborts with
    BlowUpError rather than marching NaNs to the end.
    """
    h = schedule.h_last
    n_steps = round(t_end / h)
    if n_steps < 1 or abs(n_steps * h - t_end) > 1e-3 * t_end:
        raise ValueError(
            f"t_end = {t_end} is not a whole number of outer steps h = {h:.6e}"
        )
    calls = 0

    def counted(x):
        nonlocal calls
        calls += 1
        return rhs(x)

    norm0 = float(np.max(np.abs(f0)))
    limit = blow_up_factor * max(norm0, 1e-300)
    snap_at = set()
    if n_snapshots > 0:
        marks = np.unique(np.round(np.linspace(0, n_steps, n_snapshots + 1)).astype(int))
        snap_at = set(int(s) for s in marks)
    rows = []
    snapshots = []
    snap_times = []
    f = np.array(f0, dtype=float, copy=True)
    if probe is not None:
        rows.append(tuple(probe(f)))
    if 0 in snap_at:
        snapshots.append(f.copy())
        snap_times.append(0.0)
    for step in range(1, n_steps + 1):
        f = telescopic_step(f, counted, schedule)
        t = step * h
        peak = float(np.max(np.abs(f)))
        if not np.isfinite(peak) or peak > limit:
            raise BlowUpError(step, t, peak)
        if probe is not None:
            rows.append(tuple(probe(f)))
        if step in snap_at:
            snapshots.append(f.copy())
            snap_times.append(t)
    times = np.arange(n_steps + 1) * h
    observables = np.array(rows) if rows else np.empty((0, 0))
    return IntegrationResult(
        times=times,
        observables=observables,
        probe_names=tuple(probe_names),
        snapshots=snapshots,
        final=f,
        n_steps=n_steps,
        rhs_evaluations=calls,
        snapshot_times=tuple(snap_times),
    )
