"""Periodic spatial discretization of the transport term.

Everything here approximates v * d/dx on a uniform periodic grid of the unit
interval (unit square in 2D), upwinded by the sign of each velocity node.
The linear upwind schemes are plain one-sided differences and expose an
exact Fourier symbol; the WENO schemes are nonlinear flux reconstructions
and do not have one.
"""

from dataclasses import dataclass

import numpy as np

SCHEMES = ("upwind1", "upwind2", "upwind3", "weno2", "weno3")

# One-sided stencils for positive wind: {offset: coefficient}, denominator.
# The derivative at cell i is sum(c_m * f[i+m]) / (den * dx); negative wind
# uses the mirrored stencil.
_UPWIND_STENCILS = {
    "upwind1": ({0: 1.0, -1: -1.0}, 1.0),
    "upwind2": ({0: 3.0, -1: -4.0, -2: 1.0}, 2.0),
    "upwind3": ({1: 2.0, 0: 3.0, -1: -6.0, -2: 1.0}, 6.0),
}

_WENO_EPS = 1e-6


@dataclass(frozen=True)
class SpaceGrid1D:
    """Uniform periodic grid on [0, 1) with midpoint cell centers."""

    n_cells: int

    def __post_init__(self):
        if self.n_cells < 1:
            raise ValueError("need at least one cell")

    @property
    def dx(self) -> float:
        return 1.0 / self.n_cells

    @property
    def centers(self) -> np.ndarray:
        return (np.arange(self.n_cells) + 0.5) * self.dx

    @classmethod
    def from_spacing(cls, dx: float) -> "SpaceGrid1D":
        n = round(1.0 / dx)
        if abs(n * dx - 1.0) > 1e-9:
            raise ValueError(f"dx={dx} does not divide the unit interval")
        return cls(n)


@dataclass(frozen=True)
class SpaceGrid2D:
    """Uniform periodic grid on the unit square."""

    n_x: int
    n_y: int

    def __post_init__(self):
        if self.n_x < 1 or self.n_y < 1:
            raise ValueError("need at least one cell per axis")

    @property
    def dx(self) -> float:
        return 1.0 / self.n_x

    @property
    def dy(self) -> float:
        return 1.0 / self.n_y

    @property
    def centers_x(self) -> np.ndarray:
        return (np.arange(self.n_x) + 0.5) * self.dx

    @property
    def centers_y(self) -> np.ndarray:
        return (np.arange(self.n_y) + 0.5) * self.dy

    @classmethod
    def from_spacing(cls, dx: float, dy: float | None = None) -> "SpaceGrid2D":
        if dy is None:
            dy = dx
        nx = round(1.0 / dx)
        ny = round(1.0 / dy)
        if abs(nx * dx - 1.0) > 1e-9 or abs(ny * dy - 1.0) > 1e-9:
            raise ValueError("spacings must divide the unit interval")
        return cls(nx, ny)


def _check_scheme(scheme: str):
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}, expected one of {SCHEMES}")


def _wind_groups(v):
    """Selectors for the negative- and nonnegative-wind velocity nodes.

    Contiguous sign groups (the case for sorted node sets) come back as
    slices so indexing with them stays a view; anything else falls back to
    index arrays.
    """
    def as_sel(idx):
        if idx.size and idx.size == idx[-1] - idx[0] + 1:
            return slice(int(idx[0]), int(idx[-1]) + 1)
        return idx

    return (as_sel(np.nonzero(v < 0.0)[0]),
            as_sel(np.nonzero(v >= 0.0)[0]))


def _node_slice(f, node_axis, group):
    sel = [slice(None)] * f.ndim
    sel[node_axis] = group
    return tuple(sel)


def _shift_views(f, axis, lo, hi):
    """Shift lookup backed by one periodically padded copy of ``f``.

    Returns a function whose value at ``k`` is a view equal to
    np.roll(f, -k, axis) for any k in [-lo, hi], so a whole stencil costs
    a single concatenation instead of one rolled copy per offset.
    """
    n = f.shape[axis]
    parts = []
    if lo:
        left = [slice(None)] * f.ndim
        left[axis] = slice(n - lo, None)
        parts.append(f[tuple(left)])
    parts.append(f)
    if hi:
        right = [slice(None)] * f.ndim
        right[axis] = slice(0, hi)
        parts.append(f[tuple(right)])
    padded = np.concatenate(parts, axis=axis) if len(parts) > 1 else f

    def shift(k):
        ix = [slice(None)] * f.ndim
        ix[axis] = slice(lo + k, lo + k + n)
        return padded[tuple(ix)]

    return shift


def _backward_difference(g, axis):
    """g - np.roll(g, 1, axis) without materializing the rolled copy."""
    out = np.empty_like(g)
    n = g.shape[axis]

    def span(a, b):
        ix = [slice(None)] * g.ndim
        ix[axis] = slice(a, b)
        return tuple(ix)

    np.subtract(g[span(1, n)], g[span(0, n - 1)], out=out[span(1, n)])
    np.subtract(g[span(0, 1)], g[span(n - 1, n)], out=out[span(0, 1)])
    return out


def _upwind_derivative(f, v, dx, scheme, axis, node_axis):
    """Directional derivative sum for the linear schemes, any array layout.

    ``axis`` is the space axis being differenced and ``node_axis`` the axis
    the velocity nodes vary along.  The wind direction is fixed per node,
    so each one-sided difference runs only on the node slices that use it.
    """
    stencil, den = _UPWIND_STENCILS[scheme]
    node_axis = node_axis % f.ndim
    neg, pos = _wind_groups(v)
    out = np.empty_like(f)
    for group, sign in ((pos, 1), (neg, -1)):
        part = f[_node_slice(f, node_axis, group)]
        if part.size == 0:
            continue
        offsets = [sign * off for off in stencil]
        shift = _shift_views(part, axis, max(0, -min(offsets)), max(0, max(offsets)))
        d = None
        for off, coeff in stencil.items():
            term = (sign * coeff) * shift(sign * off)
            if d is None:
                d = term
            else:
                d += term
        out[_node_slice(f, node_axis, group)] = d
    shape = [1] * f.ndim
    shape[node_axis] = v.size
    vb = v.reshape(shape)
    return vb * out / (den * dx)


def _weno_combine(polys, betas, ideal):
    """Blend candidate polynomials by their nonlinear stencil weights.

    Uses the unnormalized weights d / (eps + beta)^2 and divides by their
    sum once at the end, which is algebraically the normalized blend.
    """
    num = None
    den = None
    for p, b, d in zip(polys, betas, ideal):
        a = _WENO_EPS + b
        a *= a
        np.divide(d, a, out=a)
        if num is None:
            num = a * p
            den = a
        else:
            num += a * p
            den += a
    return num / den


def _weno3_betas(d1, d2, d3, d4):
    """Third-order smoothness indicators from consecutive first differences.

    For the stencil values (g0, g1, g2, g3, g4) with differences
    d_k = g_k - g_{k-1}, these are the usual squared-curvature plus
    squared-slope measures of the three candidate substencils.  Every
    term is quadratic, so flipping the sign of all four differences
    (reading the stencil backwards) leaves the result unchanged.
    """
    curv = 13.0 / 12.0
    b0 = curv * np.square(d2 - d1) + 0.25 * np.square(3.0 * d2 - d1)
    b1 = curv * np.square(d3 - d2) + 0.25 * np.square(d3 + d2)
    b2 = curv * np.square(d4 - d3) + 0.25 * np.square(d4 - 3.0 * d3)
    return b0, b1, b2


def _weno_interface_plus(f, scheme, axis):
    """Reconstructed interface value at i+1/2 for positive wind."""
    if scheme == "weno2":
        # shift(k)[i] = f[i+k] with periodic wrap, here and below
        shift = _shift_views(f, axis, 1, 1)
        fm1, f0, fp1 = shift(-1), f, shift(1)
        p0 = 0.5 * (-fm1 + 3.0 * f0)
        p1 = 0.5 * (f0 + fp1)
        betas = (np.square(f0 - fm1), np.square(fp1 - f0))
        return _weno_combine((p0, p1), betas, (1.0 / 3.0, 2.0 / 3.0))
    shift = _shift_views(f, axis, 2, 2)
    fm2, fm1, f0, fp1, fp2 = shift(-2), shift(-1), f, shift(1), shift(2)
    p0 = (2.0 * fm2 - 7.0 * fm1 + 11.0 * f0) / 6.0
    p1 = (-fm1 + 5.0 * f0 + 2.0 * fp1) / 6.0
    p2 = (2.0 * f0 + 5.0 * fp1 - fp2) / 6.0
    betas = _weno3_betas(fm1 - fm2, f0 - fm1, fp1 - f0, fp2 - fp1)
    return _weno_combine((p0, p1, p2), betas, (0.1, 0.6, 0.3))


def _weno_interface_minus(f, scheme, axis):
    """Interface value at i+1/2 for negative wind (mirror of the plus case)."""
    if scheme == "weno2":
        shift = _shift_views(f, axis, 0, 2)
        f0, fp1, fp2 = f, shift(1), shift(2)
        p0 = 0.5 * (-fp2 + 3.0 * fp1)
        p1 = 0.5 * (fp1 + f0)
        betas = (np.square(fp1 - fp2), np.square(f0 - fp1))
        return _weno_combine((p0, p1), betas, (1.0 / 3.0, 2.0 / 3.0))
    shift = _shift_views(f, axis, 1, 3)
    fm1, f0, fp1, fp2, fp3 = shift(-1), f, shift(1), shift(2), shift(3)
    p0 = (2.0 * fp3 - 7.0 * fp2 + 11.0 * fp1) / 6.0
    p1 = (-fp2 + 5.0 * fp1 + 2.0 * f0) / 6.0
    p2 = (2.0 * fp1 + 5.0 * f0 - fm1) / 6.0
    betas = _weno3_betas(fp3 - fp2, fp2 - fp1, fp1 - f0, f0 - fm1)
    return _weno_combine((p0, p1, p2), betas, (0.1, 0.6, 0.3))


def _weno_derivative(f, v, dx, scheme, axis, node_axis):
    """Flux-difference form (F[i+1/2] - F[i-1/2]) / dx, upwinded per node.

    Each nonlinear reconstruction runs only on the node slices whose wind
    actually selects it, which halves the work for symmetric node sets.
    """
    node_axis = node_axis % f.ndim
    neg, pos = _wind_groups(v)
    fhat = np.empty_like(f)
    for group, reconstruct in ((pos, _weno_interface_plus),
                               (neg, _weno_interface_minus)):
        part = f[_node_slice(f, node_axis, group)]
        if part.size:
            fhat[_node_slice(f, node_axis, group)] = reconstruct(part, scheme, axis)
    shape = [1] * f.ndim
    shape[node_axis] = v.size
    vb = v.reshape(shape)
    return vb * _backward_difference(fhat, axis) / dx


def convective_derivative(f: np.ndarray, v: np.ndarray, dx: float, scheme: str,
                          axis: int = 0, node_axis: int = -1) -> np.ndarray:
    """Approximate v * df/dx along one periodic space axis.

    ``f`` holds node values with the space axis at ``axis`` and the matching
    velocity component varying along ``node_axis``; the wind direction is
    taken from the sign of each node.  All schemes conserve mass exactly on
    the periodic grid: the upwind stencil coefficients sum to zero and the
    WENO form telescopes by construction.
    """
    _check_scheme(scheme)
    v = np.asarray(v)
    if scheme in _UPWIND_STENCILS:
        return _upwind_derivative(f, v, dx, scheme, axis, node_axis)
    return _weno_derivative(f, v, dx, scheme, axis, node_axis)


def transport_1d(f: np.ndarray, vgrid, grid: SpaceGrid1D, scheme: str) -> np.ndarray:
    """v * df/dx for a (cells, nodes) array."""
    return convective_derivative(f, vgrid.nodes, grid.dx, scheme, axis=0, node_axis=1)


def transport_2d(f: np.ndarray, vgrid, grid: SpaceGrid2D, scheme: str) -> np.ndarray:
    """vx * df/dx + vy * df/dy for a (cells_x, cells_y, nodes_x, nodes_y) array."""
    dfx = convective_derivative(f, vgrid.nodes_x, grid.dx, scheme, axis=0, node_axis=2)
    dfy = convective_derivative(f, vgrid.nodes_y, grid.dy, scheme, axis=1, node_axis=3)
    return dfx + dfy


def fourier_symbol(scheme: str, v: np.ndarray, zeta, dx: float) -> np.ndarray:
    """Symbol D(zeta) of the discrete -v * d/dx operator on plane waves.

    Applying the scheme to exp(1j * zeta * i) multiplies it by D.  Only the
    linear upwind schemes have one; the WENO limiters make the operator
    nonlinear, so asking for their symbol raises instead of silently
    substituting something else.
    """
    _check_scheme(scheme)
    if scheme not in _UPWIND_STENCILS:
        raise ValueError(
            f"{scheme} is nonlinear and has no Fourier symbol; "
            "analyze the matching linear upwind scheme instead"
        )
    stencil, den = _UPWIND_STENCILS[scheme]
    zeta = np.asarray(zeta, dtype=float)
    s = np.zeros(zeta.shape, dtype=complex)
    for off, coeff in stencil.items():
        s = s + coeff * np.exp(1j * off * zeta)
    s = s / den
    v = np.asarray(v, dtype=float)
    vcol = v[..., None] if zeta.ndim else v
    return np.where(vcol >= 0.0, -vcol / dx * s, vcol / dx * np.conj(s))
