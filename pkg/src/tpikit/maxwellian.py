"""Maxwellian closures and velocity moments."""

from dataclasses import dataclass

import numpy as np

from .quadrature import VelocityGrid1D, VelocityGrid2D

# Densities below this floor are clamped before dividing for bulk velocity
# and temperature, so near-vacuum cells give harmless numbers instead of
# inf/nan.  The floor is far below any density the solver itself produces.
RHO_FLOOR = 1e-14


@dataclass(frozen=True)
class Moments:
    """Cell-wise density, bulk velocity and temperature."""

    density: np.ndarray
    velocity: np.ndarray
    temperature: np.ndarray


def density(f: np.ndarray, vgrid) -> np.ndarray:
    """Zeroth velocity moment, one value per spatial cell."""
    if isinstance(vgrid, VelocityGrid1D):
        return f @ vgrid.weights
    return np.einsum("...jk,jk->...", f, vgrid.weights)


def moments(f: np.ndarray, vgrid) -> Moments:
    """Density, bulk velocity and temperature of a node-value array.

    For 1D ``f`` has shape (cells, nodes); velocity and temperature are
    per-cell scalars.  For 2D ``f`` has shape (cells_x, cells_y, nodes_x,
    nodes_y) and the velocity gets a trailing component axis of length two.
    """
    rho = density(f, vgrid)
    safe = np.maximum(rho, RHO_FLOOR)
    if isinstance(vgrid, VelocityGrid1D):
        v = vgrid.nodes
        u = (f @ (vgrid.weights * v)) / safe
        e2 = (f @ (vgrid.weights * v * v)) / safe
        temp = e2 - u * u
        return Moments(rho, u, temp)
    vx = vgrid.nodes_x[:, None]
    vy = vgrid.nodes_y[None, :]
    ux = np.einsum("...jk,jk->...", f, vgrid.weights * vx) / safe
    uy = np.einsum("...jk,jk->...", f, vgrid.weights * vy) / safe
    e2 = np.einsum("...jk,jk->...", f, vgrid.weights * (vx * vx + vy * vy)) / safe
    temp = 0.5 * (e2 - ux * ux - uy * uy)
    u = np.stack([ux, uy], axis=-1)
    return Moments(rho, u, temp)


def linearized_maxwellian(rho: np.ndarray, vgrid) -> np.ndarray:
    """Equilibrium rho * (1 + v) at the quadrature nodes.

    This is the small-velocity linearization of the Maxwellian around the
    global state (u, T) = (0, 1); in 2D the factors for the two components
    multiply.  Its discrete first moment is exactly rho because the
    symmetrized rule integrates v**2 exactly, which is what makes the
    hydrodynamic limit of the relaxation system plain advection at speed
    one along each axis.
    """
    rho = np.asarray(rho)
    if isinstance(vgrid, VelocityGrid1D):
        return rho[..., None] * (1.0 + vgrid.nodes)
    fx = 1.0 + vgrid.nodes_x
    fy = 1.0 + vgrid.nodes_y
    return rho[..., None, None] * fx[:, None] * fy[None, :]


def maxwellian(rho, u, temperature, vgrid: VelocityGrid1D) -> np.ndarray:
    """Full 1D Maxwellian node values relative to the Gaussian measure.

    Provided for diagnostics and initial data; the relaxation operator
    itself uses :func:`linearized_maxwellian`.
    """
    rho = np.asarray(rho, dtype=float)
    u = np.asarray(u, dtype=float)
    temperature = np.asarray(temperature, dtype=float)
    if np.any(temperature <= 0.0):
        raise ValueError("temperature must be positive")
    v = vgrid.nodes
    arg = 0.5 * v**2 - (v - u[..., None]) ** 2 / (2.0 * temperature[..., None])
    return rho[..., None] * np.exp(arg) / np.sqrt(temperature[..., None])
