"""Telescopic step-size schedules and their stability analysis.

A schedule is the ladder (h_0, {M_l}, {K_l}): level zero takes inner steps
h_0, and every level above it runs K+1 steps of the level below, then
extrapolates forward by a factor M, so h_{l+1} = (M_l + K_l + 1) h_l.  The
two planners here pick the ladder from the spectrum: one places a level per
relaxation cluster, the other fixes K and reuses the largest M for which the
level map keeps [0, 1] invariant.
"""

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

OUTER_METHODS = ("pfe", "prk2", "prk4")
PLAN_METHODS = ("manual", "clustered", "zero_one")

# Display values, two decimals, for the largest [0,1]-stable M per K.  The
# planners use the unrounded roots from zero_one_max_m.
ZERO_ONE_MAX_M_TABLE = {
    1: 2.0, 2: 3.0, 3: 6.66, 4: 8.32, 5: 12.21,
    6: 14.24, 7: 18.21, 8: 20.48, 9: 24.48, 10: 26.91,
}


class InfeasibleScheduleError(RuntimeError):
    """No schedule satisfies the requested constraints."""


def pfe_multiplier(sigma, m: float, k: int):
    """Amplification of one projective level step given the inner multiplier.

    K+1 inner steps turn 1 into sigma**(K+1); the extrapolation adds
    M (sigma**(K+1) - sigma**K), giving ((M+1) sigma - M) sigma**K.
    """
    return ((m + 1.0) * sigma - m) * sigma**k


def _invariance_margin(m: float, k: int) -> float:
    """Nonpositive iff the level map keeps the interval [-eta, 1] invariant."""
    eta = (m / (k + 1.0)) * (k * m / ((k + 1.0) * (m + 1.0))) ** k
    if k % 2 == 1:
        return ((m + 1.0) * eta + m) * eta**k - 1.0
    return ((m + 1.0) * eta + m) * eta ** (k - 1) - 1.0


@lru_cache(maxsize=None)
def zero_one_max_m(k: int) -> float:
    """Largest M for which the level map keeps [0, 1]-multipliers stable.

    For K = 1 and K = 2 the root is exactly 2 and 3; beyond that it is the
    zero of the interval-invariance margin, found by bracketing.
    """
    if not 1 <= k <= 10:
        raise ValueError("inner step count K must be between 1 and 10")
    return brentq(lambda m: _invariance_margin(m, k), 1.0 + 1e-9, 60.0, xtol=1e-13)


@dataclass(frozen=True)
class TpiSchedule:
    """A validated telescopic ladder plus the outer integrator choice.

    ``h`` has one more entry than ``M``/``K``; h[0] is the inner step and
    h[-1] the outer step.  The chain identity h[l+1] = (M[l]+K[l]+1) h[l]
    is enforced on construction so a hand-edited file cannot smuggle in an
    inconsistent ladder.
    """

    eps: float
    dx: float
    h: tuple
    m: tuple
    k: tuple
    outer: str = "pfe"
    method: str = "manual"
    warnings: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.eps <= 0.0 or self.dx <= 0.0:
            raise ValueError("eps and dx must be positive")
        if self.outer not in OUTER_METHODS:
            raise ValueError(f"unknown outer method {self.outer!r}")
        if self.method not in PLAN_METHODS:
            raise ValueError(f"unknown planning method {self.method!r}")
        levels = len(self.m)
        if levels < 1 or len(self.k) != levels or len(self.h) != levels + 1:
            raise ValueError("schedule arrays have inconsistent lengths")
        if any(int(kk) != kk or kk < 1 for kk in self.k):
            raise ValueError("inner step counts must be integers >= 1")
        if any(mm <= 0.0 for mm in self.m):
            raise ValueError("extrapolation factors must be positive")
        if self.h[0] <= 0.0:
            raise ValueError("inner step must be positive")
        for l in range(levels):
            expect = self.h[l] * (self.m[l] + self.k[l] + 1.0)
            if abs(self.h[l + 1] - expect) > 1e-14 * abs(expect):
                raise ValueError(
                    f"step chain broken at level {l}: h={self.h[l + 1]!r}, "
                    f"expected {expect!r}"
                )

    @property
    def levels(self) -> int:
        return len(self.m)

    @property
    def h0(self) -> float:
        return self.h[0]

    @property
    def h_last(self) -> float:
        return self.h[-1]

    @property
    def cfl(self) -> float:
        return self.h_last / self.dx

    @classmethod
    def from_parts(cls, eps, dx, h0, m, k, outer="pfe", method="manual",
                   warnings=()) -> "TpiSchedule":
        h = [float(h0)]
        for mm, kk in zip(m, k):
            h.append(h[-1] * (mm + kk + 1.0))
        return cls(eps=float(eps), dx=float(dx), h=tuple(h),
                   m=tuple(float(mm) for mm in m), k=tuple(int(kk) for kk in k),
                   outer=outer, method=method, warnings=tuple(warnings))

    def rescaled(self, factor: float) -> "TpiSchedule":
        """The same ladder with every step size multiplied by ``factor``.

        M and K stay fixed, so the chain identity survives unchanged; the
        intended use is nudging the outer step by a fraction of a percent
        so an integration horizon becomes a whole number of steps.
        """
        if factor <= 0.0:
            raise ValueError("scale factor must be positive")
        return TpiSchedule.from_parts(
            self.eps, self.dx, self.h0 * factor, self.m, self.k,
            outer=self.outer, method=self.method, warnings=self.warnings)

    def to_json(self) -> str:
        payload = {
            "eps": self.eps, "dx": self.dx, "outer": self.outer,
            "method": self.method, "h": list(self.h), "M": list(self.m),
            "K": list(self.k), "cfl": self.cfl, "warnings": list(self.warnings),
        }
        return json.dumps(payload, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "TpiSchedule":
        data = json.loads(text)
        return cls(eps=data["eps"], dx=data["dx"], h=tuple(data["h"]),
                   m=tuple(data["M"]), k=tuple(data["K"]), outer=data["outer"],
                   method=data["method"], warnings=tuple(data.get("warnings", ())))

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json())
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "TpiSchedule":
        with open(path) as fh:
            return cls.from_json(fh.read())

    def describe(self) -> str:
        lines = [
            f"levels: {self.levels}   outer: {self.outer}   method: {self.method}",
            f"h0 = {self.h0:.6e}   h_last = {self.h_last:.6e}   "
            f"CFL = {self.cfl:.4f}",
        ]
        for l in range(self.levels):
            lines.append(
                f"  level {l}: M = {self.m[l]:10.4f}   K = {self.k[l]:2d}   "
                f"h = {self.h[l + 1]:.6e}"
            )
        for w in self.warnings:
            lines.append(f"  note: {w}")
        return "\n".join(lines)


def select_zero_one_stable(eps, k_inner, h_last, dx, rho_max=None, h0=None,
                           outer="pfe") -> TpiSchedule:
    """Constant-K ladder whose level maps keep [0, 1] invariant.

    The inner step is eps over the largest initial density unless ``h0``
    overrides it.  Levels use the largest stable M for the chosen K; the
    topmost M closes the ladder onto ``h_last`` exactly.  When the closure
    factor would drop below 2, lower levels give up M in steps of 0.1,
    outermost first, each level stopping at a floor of 2, until the closure
    recovers; if it never does the ladder is infeasible.
    """
    if h0 is None:
        if rho_max is None or rho_max <= 0.0:
            raise ValueError("need rho_max (or an explicit h0) to set the inner step")
        h0 = eps / rho_max
    if h0 <= 0.0 or h_last <= 0.0:
        raise ValueError("steps must be positive")
    ratio = h_last / h0
    if ratio <= 1.0:
        raise InfeasibleScheduleError(
            f"outer step {h_last:.3e} does not exceed inner step {h0:.3e}"
        )
    m_table = zero_one_max_m(k_inner)
    growth = m_table + k_inner + 1.0
    levels = max(1, math.ceil(math.log(ratio) / math.log(growth) - 1e-12))
    ms = [m_table] * (levels - 1)
    warnings = []

    def closure():
        h = h0
        for m in ms:
            h *= m + k_inner + 1.0
        return h_last / h - k_inner - 1.0

    c = closure()
    if c < 2.0:
        for lev in range(levels - 2, -1, -1):
            before = ms[lev]
            while ms[lev] - 0.1 >= 2.0 and c < 2.0:
                ms[lev] -= 0.1
                c = closure()
            if ms[lev] != before:
                warnings.append(
                    f"reduced level {lev} M from {before:.4f} to {ms[lev]:.4f} "
                    "to keep the closing level feasible"
                )
            if c >= 2.0:
                break
    if c < 2.0:
        raise InfeasibleScheduleError(
            f"cannot close the ladder onto h_last={h_last:.3e} with K={k_inner}: "
            f"closing M would be {c:.3f} < 2"
        )
    ms.append(c)
    return TpiSchedule.from_parts(eps, dx, h0, ms, [k_inner] * levels,
                                  outer=outer, method="zero_one",
                                  warnings=warnings)


@dataclass(frozen=True)
class ClusteredPlanInfo:
    """Diagnostics from the cluster-driven planner."""

    groups: tuple
    m_dominant: float
    m_extra_slow: float
    fast_radius: float
    h0: float


def select_clustered(report, m_min: float = 3.0, outer: str = "pfe",
                     k_max: int = 10, n_interval_samples: int = 33):
    """Plan one telescopic level per separated relaxation cluster.

    Returns (schedule, info).  Cluster centers -rate/eps are walked from the
    fastest outward; a center whose provisional extrapolation factor falls
    below ``m_min`` rides along with the previous level instead of getting
    its own.  The outermost M is capped by both the dominant transport
    branch and any cluster too slow to be damped at all; the per-level step
    counts are then the cheapest combination that keeps every tracked
    cluster interval inside the next level's stability range.
    """
    rates = report.rates
    eps = report.eps
    radius = report.fast_radius
    lam_dom = report.dominant
    min_re_dom = float(lam_dom.real.min())
    h0 = eps / max(rates)

    centers = sorted(-rate / eps for rate in rates)
    fast = [c for c in centers if c + radius < min_re_dom]
    slow = [c for c in centers if c + radius >= min_re_dom]
    if not fast:
        raise InfeasibleScheduleError(
            "no relaxation cluster is separated from the transport branch"
        )

    # Walk the fast centers from most negative outward.  A provisional ladder
    # with K = 1 everywhere decides which centers share a level; the actual
    # step counts come later with these M values frozen.
    groups = [[fast[0]]]
    ms = []
    for c in fast[1:]:
        sig = 1.0 + h0 * c
        for m in ms:
            sig = pfe_multiplier(sig, m, 1)
        m_test = sig / (1.0 - sig)
        if m_test < m_min:
            groups[-1].append(c)
        else:
            ms.append(float(m_test))
            groups.append([c])
    levels = len(ms) + 1
    if levels > 6:
        raise InfeasibleScheduleError(
            f"{levels} levels exceed what the stage search can cover; "
            "merge rates or use the zero_one planner"
        )

    h_pen = h0
    for m in ms:
        h_pen *= m + 2.0
    sig_dom = 1.0 + h0 * lam_dom
    for m in ms:
        sig_dom = pfe_multiplier(sig_dom, m, 1)
    u = 1.0 - sig_dom.real
    b = sig_dom.imag
    with np.errstate(divide="ignore", invalid="ignore"):
        m_curve = 2.0 * u / (u * u + b * b)
    damped = m_curve[u > 1e-13]
    m_dominant = float(damped.min()) if damped.size else math.inf
    m_extra_slow = min(
        (eps / (h_pen * (-c * eps)) - 1.0 for c in slow), default=math.inf
    )
    m_out = min(m_dominant, m_extra_slow)
    if not m_out > 0.0:
        raise InfeasibleScheduleError(
            "outermost extrapolation factor is nonpositive; the slow clusters "
            "leave no room above the last resolved level"
        )
    m_all = ms + [m_out]

    samples = []
    for grp in groups:
        pts = np.concatenate(
            [c + radius * np.linspace(-1.0, 1.0, n_interval_samples) for c in grp]
        )
        samples.append(1.0 + h0 * pts)

    def stage_ok(ks, s):
        limit = (1.0 / m_all[s]) ** (1.0 / ks[s])
        worst = 0.0
        for g in range(min(s + 1, len(samples))):
            sig = samples[g].copy()
            for i in range(s):
                sig = pfe_multiplier(sig, m_all[i], ks[i])
            worst = max(worst, float(np.max(np.abs(sig))))
        return worst <= limit

    best = None

    def search(prefix):
        nonlocal best
        if prefix and not stage_ok(prefix, len(prefix) - 1):
            return
        if len(prefix) == levels:
            cost = 1
            h_top = h0
            for kk, mm in zip(prefix, m_all):
                cost *= kk + 1
                h_top *= mm + kk + 1.0
            key = (cost, -h_top, tuple(prefix))
            if best is None or key < best:
                best = key
            return
        for kk in range(1, k_max + 1):
            search(prefix + [kk])

    search([])
    if best is None:
        raise InfeasibleScheduleError(
            "no combination of inner step counts keeps every cluster stable"
        )
    ks = list(best[2])
    notes = []
    if levels == 1 and len(fast) > 1:
        notes.append(
            f"no usable gap between the {len(fast)} relaxation clusters; "
            "planning a single projective level"
        )
    schedule = TpiSchedule.from_parts(eps, report.dx, h0, m_all, ks, outer=outer,
                                      method="clustered", warnings=notes)
    info = ClusteredPlanInfo(
        groups=tuple(tuple(g) for g in groups),
        m_dominant=m_dominant,
        m_extra_slow=m_extra_slow,
        fast_radius=radius,
        h0=h0,
    )
    return schedule, info


def amplification(schedule: TpiSchedule, sigma0):
    """Multiplier of one outer step applied to an inner-step multiplier.

    Composes the level maps exactly as the integrator composes states, so a
    scalar test equation run through the integrator must reproduce this to
    rounding.
    """
    sig = np.asarray(sigma0, dtype=complex)
    g = sig
    for m, kk in zip(schedule.m[:-1], schedule.k[:-1]):
        g = pfe_multiplier(g, m, kk)
    m_top = schedule.m[-1]
    k_top = schedule.k[-1]
    if schedule.outer == "pfe":
        return pfe_multiplier(g, m_top, k_top)
    from .integrators import OUTER_TABLEAUX

    tableau = OUTER_TABLEAUX[schedule.outer]
    h_inner = schedule.h[-2]
    h_outer = schedule.h[-1]
    g_k = g**k_top
    base = g * g_k
    deriv = g_k * (g - 1.0) / h_inner
    stage_slopes = [deriv]
    for s in range(1, len(tableau.b)):
        acc = 0.0
        for m_idx, a_sm in enumerate(tableau.a[s]):
            if a_sm:
                acc = acc + a_sm * stage_slopes[m_idx]
        seed = base + (tableau.c[s] * h_outer - (k_top + 1.0) * h_inner) * acc / tableau.c[s]
        stage_slopes.append(deriv * seed)
    total = 0.0
    for b_s, slope in zip(tableau.b, stage_slopes):
        if b_s:
            total = total + b_s * slope
    return base + m_top * h_inner * total


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    max_amplification: float
    n_checked: int
    worst_sigma0: complex
    violations: tuple


def verify_stability(schedule: TpiSchedule, eigenvalues, tol: float = 1e-9) -> StabilityReport:
    """Check |amplification| <= 1 + tol over computed eigenvalues.

    ``eigenvalues`` may be a spectrum report or any array of complex
    eigenvalues of the semi-discrete operator; each is mapped to the inner
    multiplier 1 + h0 lambda and pushed through the full ladder.
    """
    lams = getattr(eigenvalues, "eigenvalues", eigenvalues)
    lams = np.asarray(lams, dtype=complex).ravel()
    sig0 = 1.0 + schedule.h0 * lams
    amp = np.abs(amplification(schedule, sig0))
    worst = int(np.argmax(amp))
    bad = np.nonzero(amp > 1.0 + tol)[0]
    violations = tuple(
        (int(i), float(amp[i])) for i in bad[np.argsort(amp[bad])[::-1][:10]]
    )
    return StabilityReport(
        stable=bad.size == 0,
        max_amplification=float(amp[worst]),
        n_checked=int(amp.size),
        worst_sigma0=complex(sig0[worst]),
        violations=violations,
    )
