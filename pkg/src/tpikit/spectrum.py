"""Fourier analysis of the semi-discrete relaxation system.

For each spatial mode the semi-discrete operator reduces to a small complex
matrix acting on the velocity nodes; its eigenvalues organize into fast
relaxation clusters near -nu/eps and one slowly decaying transport branch.
Everything the step-size planner needs (cluster centers, the fast spectral
radius, the dominant branch) is computed here.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .quadrature import VelocityGrid1D, VelocityGrid2D
from .spatial import SpaceGrid1D, fourier_symbol
from .system import CollisionModel

# WENO limiters have no linear symbol; spectrum analysis substitutes the
# linear upwind scheme of the same stencil width and reports having done so.
ANALYSIS_PROXY = {"weno2": "upwind2", "weno3": "upwind3"}

EIG_DENSE_MAX_DIM = 512


@dataclass(frozen=True)
class ClusterDisk:
    """A disk expected to contain one relaxation cluster of eigenvalues."""

    center: float
    radius: float
    rate: float
    kind: str  # "fast" or "extra_slow"


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalue sweep over all spatial modes, one row of blocks per rate.

    ``eigenvalues`` has shape (n_rates, n_modes, n_nodes).  ``dominant`` is
    the perturbation-expansion estimate of the slow branch per mode, built
    with the fastest rate.  ``fast_radius`` bounds the transport symbol over
    all modes and velocity nodes.
    """

    eps: float
    dx: float
    scheme: str
    analysis_scheme: str
    rates: tuple
    mode_freqs: np.ndarray
    eigenvalues: np.ndarray
    fast_radius: float
    dominant: np.ndarray
    clusters: tuple
    gap_ratios: tuple

    @property
    def n_modes(self) -> int:
        return self.mode_freqs.size

    @property
    def h0_fast(self) -> float:
        """Inner step eps / max rate, the natural explicit scale."""
        return self.eps / max(self.rates)


def mode_frequencies(sgrid: SpaceGrid1D) -> np.ndarray:
    """Nonzero mode frequencies zeta_i = 2 pi i dx, i = 1..cells.

    The last entry is 2 pi, equivalent to the constant mode, whose exact
    eigenvalue 0 closes the slow branch.
    """
    n = sgrid.n_cells
    return 2.0 * np.pi * np.arange(1, n + 1) * sgrid.dx


def analysis_scheme(scheme: str) -> str:
    return ANALYSIS_PROXY.get(scheme, scheme)


def build_symbol(rate: float, eps: float, zeta: float, vgrid: VelocityGrid1D,
                 dx: float, scheme: str) -> np.ndarray:
    """Per-mode system matrix (rate/eps) (M P - I) + diag(D(zeta))."""
    v = vgrid.nodes
    w = vgrid.weights
    j = v.size
    proj = np.tile(w, (j, 1))
    equil = (1.0 + v)[:, None] * proj
    relax = (rate / eps) * (equil - np.eye(j))
    drift = np.diag(fourier_symbol(scheme, v, zeta, dx))
    return relax + drift


def build_symbol_2d(rate: float, eps: float, zeta: tuple, vgrid: VelocityGrid2D,
                    spacings: tuple, scheme: str) -> np.ndarray:
    """Same matrix for a 2D mode pair, acting on the flattened node grid."""
    vx, vy = vgrid.nodes_x, vgrid.nodes_y
    wflat = vgrid.weights.ravel()
    j2 = wflat.size
    proj = np.tile(wflat, (j2, 1))
    mfac = ((1.0 + vx)[:, None] * (1.0 + vy)[None, :]).ravel()
    relax = (rate / eps) * (mfac[:, None] * proj - np.eye(j2))
    dxsym = fourier_symbol(scheme, vx, zeta[0], spacings[0])
    dysym = fourier_symbol(scheme, vy, zeta[1], spacings[1])
    drift = np.diag((dxsym[:, None] + dysym[None, :]).ravel())
    return relax + drift


def eig_dense(a: np.ndarray, residual_tol: float = 1e-8) -> np.ndarray:
    """Dense eigenvalues with an explicit residual check.

    Guards the dimension so nobody accidentally feeds the full physical-space
    operator through here, and verifies ||A v - lambda v|| against ||A|| so a
    silently bad LAPACK result cannot poison a stability verdict.
    """
    a = np.asarray(a)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    if n > EIG_DENSE_MAX_DIM:
        raise ValueError(f"matrix dimension {n} exceeds dense limit {EIG_DENSE_MAX_DIM}")
    lam, vecs = np.linalg.eig(a)
    residual = np.linalg.norm(a @ vecs - vecs * lam, axis=0)
    scale = max(np.linalg.norm(a), 1e-300)
    worst = float(residual.max() / scale)
    if worst > residual_tol:
        raise RuntimeError(f"eigen residual {worst:.2e} exceeds {residual_tol:.0e}")
    return lam


def fast_spectral_radius(vgrid: VelocityGrid1D, sgrid: SpaceGrid1D, scheme: str) -> float:
    """Largest |D(zeta)| over all modes and nodes for the linear scheme."""
    zetas = mode_frequencies(sgrid)
    d = fourier_symbol(analysis_scheme(scheme), vgrid.nodes, zetas, sgrid.dx)
    return float(np.max(np.abs(d)))


def dominant_expansion(vgrid: VelocityGrid1D, zeta, dx: float, scheme: str,
                       eps_over_rate: float):
    """First-order-in-eps estimate of the slow transport eigenvalue branch.

    The zeroth order is the weighted average of the transport symbol over the
    velocity measure; the first-order correction accounts for the spread the
    relaxation does not remove.  Valid while eps_over_rate stays well below
    one over the symbol scale.
    """
    d = fourier_symbol(analysis_scheme(scheme), vgrid.nodes, np.asarray(zeta, dtype=float),
                       dx)
    w = vgrid.weights
    v = vgrid.nodes if np.ndim(zeta) == 0 else vgrid.nodes[:, None]
    alpha = d.real
    beta = d.imag
    am = w @ alpha
    bvm = w @ (beta * v)
    a2m = w @ (alpha * alpha)
    b2m = w @ (beta * beta)
    abvm = w @ (alpha * beta * v)
    re = am + (a2m - am * am - b2m + bvm * bvm) * eps_over_rate
    im = bvm + 2.0 * (abvm - am * bvm) * eps_over_rate
    return re + 1j * im


def _collision_rates(model: CollisionModel, rho0):
    rates = model.analytic_rates()
    if rates:
        return rates
    if rho0 is None:
        raise ValueError("density-dependent collision model needs rho0 for its rates")
    vals = np.unique(np.asarray(rho0, dtype=float))
    if np.any(vals <= 0.0):
        raise ValueError("initial density must be positive to set relaxation rates")
    return tuple(sorted(vals.tolist(), reverse=True))


def full_spectrum(model: CollisionModel, eps: float, sgrid: SpaceGrid1D,
                  vgrid: VelocityGrid1D, scheme: str, rho0=None) -> SpectrumReport:
    """Eigenvalues of every mode matrix for every relaxation rate (1D).

    For the density-dependent model the rates are the distinct initial
    densities; for the piecewise profile they are the profile values.  The
    2D planner never needs this sweep, so the operator stays 1D.
    """
    if not isinstance(sgrid, SpaceGrid1D):
        raise ValueError("full_spectrum is one-dimensional; use build_symbol_2d per mode")
    proxy = analysis_scheme(scheme)
    rates = _collision_rates(model, rho0)
    zetas = mode_frequencies(sgrid)
    n_modes = zetas.size
    j = vgrid.size
    eigs = np.empty((len(rates), n_modes, j), dtype=complex)
    for l, rate in enumerate(rates):
        for i, z in enumerate(zetas):
            eigs[l, i] = eig_dense(build_symbol(rate, eps, z, vgrid, sgrid.dx, proxy))
    radius = fast_spectral_radius(vgrid, sgrid, scheme)
    dominant = dominant_expansion(vgrid, zetas, sgrid.dx, scheme, eps / rates[0])
    min_dom = float(dominant.real.min())
    disks = []
    for rate in rates:
        center = -rate / eps
        kind = "fast" if center + radius < min_dom else "extra_slow"
        disks.append(ClusterDisk(center=center, radius=radius, rate=rate, kind=kind))
    gaps = tuple(
        abs(disks[l].center) / abs(disks[l + 1].center) for l in range(len(disks) - 1)
    )
    return SpectrumReport(
        eps=eps,
        dx=sgrid.dx,
        scheme=scheme,
        analysis_scheme=proxy,
        rates=tuple(rates),
        mode_freqs=zetas,
        eigenvalues=eigs,
        fast_radius=radius,
        dominant=dominant,
        clusters=tuple(disks),
        gap_ratios=gaps,
    )


@dataclass(frozen=True)
class ContainmentReport:
    """Check that all but the slow branch sit inside the fast disks."""

    all_contained: bool
    worst_excess: float
    n_checked: int


def containment_check(report: SpectrumReport, inflation: float = 1e-6) -> ContainmentReport:
    """Verify the fast eigenvalues lie in the union of cluster disks.

    Per mode matrix the rightmost eigenvalue is the slow branch and is
    excluded; the rest must sit in some disk of radius fast_radius around a
    cluster center, inflated by ``inflation`` relative to |center| + radius.
    """
    centers = np.array([d.center for d in report.clusters])
    slack = inflation * (np.abs(centers) + report.fast_radius)
    worst = -np.inf
    n_checked = 0
    for l in range(len(report.rates)):
        block = report.eigenvalues[l]
        order = np.argsort(block.real, axis=1)
        for i in range(report.n_modes):
            fast_part = block[i][order[i][:-1]]
            dist = np.abs(fast_part[:, None] - centers[None, :])
            excess = np.min(dist - (report.fast_radius + slack)[None, :], axis=1)
            worst = max(worst, float(excess.max()) if excess.size else -np.inf)
            n_checked += fast_part.size
    return ContainmentReport(all_contained=worst <= 0.0, worst_excess=worst,
                             n_checked=n_checked)


@dataclass(frozen=True)
class EmpiricalCluster:
    center: float
    radius: float
    members: int


def cluster_real_parts(eigenvalues, rel_gap: float = 0.3, positive_tol: float = 1e-9):
    """Group eigenvalues by gaps in their real parts.

    Sorted real parts are split wherever the gap to the next value exceeds
    ``rel_gap`` times the larger magnitude of the two sides.  Returns the
    clusters most negative first plus the list of eigenvalues whose real
    part is positive beyond tolerance (there should be none for a stable
    semi-discretization).
    """
    lams = np.asarray(eigenvalues).ravel()
    re = np.sort(lams.real)
    groups = []
    start = 0
    for i in range(1, re.size):
        scale = max(abs(re[i - 1]), abs(re[i]), 1e-300)
        if re[i] - re[i - 1] > rel_gap * scale:
            groups.append(re[start:i])
            start = i
    groups.append(re[start:])
    clusters = tuple(
        EmpiricalCluster(center=float(g.mean()),
                         radius=float(np.max(np.abs(g - g.mean()))),
                         members=int(g.size))
        for g in groups
    )
    unstable = lams[lams.real > positive_tol]
    return clusters, unstable


def physical_space_matrix(model: CollisionModel, eps: float, sgrid: SpaceGrid1D,
                          vgrid: VelocityGrid1D, scheme: str, rho0=None) -> np.ndarray:
    """Full (cells * nodes) operator matrix for cross-checking small cases.

    Variables are ordered cell-major.  Only the linear upwind schemes are
    meaningful here.  For the density-dependent model the coefficients are
    frozen at rho0.
    """
    from .spatial import _UPWIND_STENCILS  # stencil table is the single source

    if scheme not in _UPWIND_STENCILS:
        raise ValueError("physical-space matrix requires a linear upwind scheme")
    n = sgrid.n_cells
    j = vgrid.size
    dim = n * j
    if dim > 4000:
        raise ValueError(f"physical-space dimension {dim} too large for a dense matrix")
    if model.kind == "density":
        if rho0 is None:
            raise ValueError("density-dependent model needs rho0")
        nu = np.asarray(rho0, dtype=float)
    else:
        nu = model.frequencies(np.ones(n), sgrid)
    a = np.zeros((dim, dim))
    v = vgrid.nodes
    w = vgrid.weights
    block = (1.0 + v)[:, None] * np.tile(w, (j, 1)) - np.eye(j)
    for i in range(n):
        sl = slice(i * j, (i + 1) * j)
        a[sl, sl] += (nu[i] / eps) * block
    stencil, den = _UPWIND_STENCILS[scheme]
    for jj in range(j):
        speed = v[jj]
        if speed >= 0.0:
            contrib = {off: -speed * c / (den * sgrid.dx) for off, c in stencil.items()}
        else:
            contrib = {-off: speed * c / (den * sgrid.dx) for off, c in stencil.items()}
        for off, val in contrib.items():
            for i in range(n):
                a[i * j + jj, ((i + off) % n) * j + jj] += val
    return a


def spectrum_to_csv(report: SpectrumReport, path):
    """Write one row per eigenvalue: rate and mode indices, value, disk id.

    ``cluster_id`` is the index of the nearest cluster disk that contains
    the eigenvalue (-1 when none does, which is where the slow branch
    lands).
    """
    centers = np.array([d.center for d in report.clusters])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rate_index", "mode_index", "re_lambda", "im_lambda",
                         "cluster_id"])
        for l in range(len(report.rates)):
            for i in range(report.n_modes):
                for lam in report.eigenvalues[l, i]:
                    dist = np.abs(lam - centers)
                    nearest = int(np.argmin(dist))
                    cid = nearest if dist[nearest] <= report.fast_radius * (1 + 1e-6) else -1
                    writer.writerow([l, i + 1, f"{lam.real:.17g}", f"{lam.imag:.17g}", cid])
