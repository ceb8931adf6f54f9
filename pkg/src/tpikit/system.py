"""The semi-discrete relaxation system and its collision models."""

from dataclasses import dataclass, field

import numpy as np

from .maxwellian import density, linearized_maxwellian
from .quadrature import VelocityGrid1D
from .spatial import SpaceGrid1D, SpaceGrid2D, transport_1d, transport_2d

COLLISION_KINDS = ("constant", "profile", "density")


@dataclass(frozen=True)
class CollisionModel:
    """Relaxation frequency nu as a function of space and state.

    kind "constant": nu = omega everywhere.
    kind "profile": nu is piecewise constant in x; ``breakpoints`` are the
        right edges of the pieces (the last must be 1.0) and ``values`` the
        frequency on each piece.  1D only.
    kind "density": nu equals the local density, frozen at the start of each
        right-hand-side evaluation.
    """

    kind: str
    omega: float = 1.0
    breakpoints: tuple = field(default_factory=tuple)
    values: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind not in COLLISION_KINDS:
            raise ValueError(f"unknown collision kind {self.kind!r}")
        if self.kind == "constant" and self.omega <= 0.0:
            raise ValueError("constant collision frequency must be positive")
        if self.kind == "profile":
            if len(self.breakpoints) != len(self.values) or not self.values:
                raise ValueError("profile needs matching breakpoints and values")
            if any(b <= 0.0 or b > 1.0 for b in self.breakpoints):
                raise ValueError("profile breakpoints must lie in (0, 1]")
            if list(self.breakpoints) != sorted(self.breakpoints):
                raise ValueError("profile breakpoints must be increasing")
            if abs(self.breakpoints[-1] - 1.0) > 1e-12:
                raise ValueError("last profile breakpoint must be 1.0")
            if any(v <= 0.0 for v in self.values):
                raise ValueError("profile frequencies must be positive")

    def frequencies(self, rho: np.ndarray, sgrid) -> np.ndarray:
        """Cell-wise relaxation frequency for the given (frozen) density."""
        if self.kind == "constant":
            return np.full_like(np.asarray(rho, dtype=float), self.omega)
        if self.kind == "density":
            return np.asarray(rho, dtype=float)
        if not isinstance(sgrid, SpaceGrid1D):
            raise ValueError("piecewise profile frequencies are 1D only")
        idx = np.searchsorted(np.asarray(self.breakpoints), sgrid.centers, side="left")
        return np.asarray(self.values, dtype=float)[idx]

    def analytic_rates(self) -> tuple:
        """Distinct frequency scales the model can produce, if known a priori.

        Empty for the density-dependent kind, where the scales come from the
        initial density instead.
        """
        if self.kind == "constant":
            return (self.omega,)
        if self.kind == "profile":
            return tuple(sorted(set(self.values), reverse=True))
        return ()


def _check_finite(f: np.ndarray):
    lo = f.min()
    hi = f.max()
    if not (np.isfinite(lo) and np.isfinite(hi)):
        bad = np.argwhere(~np.isfinite(f))[0]
        raise FloatingPointError(
            f"non-finite node value at index {tuple(int(b) for b in bad)}"
        )


def make_rhs(model: CollisionModel, eps: float, sgrid, vgrid, scheme: str):
    """Right-hand side closure for df/dt = -v.grad f + nu/eps (M[f] - f).

    The returned callable maps a node-value array to its time derivative.
    The collision frequency is evaluated from the current density once per
    call and held fixed inside it, so the density-dependent model is still
    a plain (frozen-coefficient) linear operator within a single stage.
    """
    if eps <= 0.0:
        raise ValueError("relaxation parameter eps must be positive")
    if isinstance(sgrid, SpaceGrid2D) == isinstance(vgrid, VelocityGrid1D):
        raise ValueError("space and velocity grids have mismatched dimension")
    two_dim = isinstance(sgrid, SpaceGrid2D)

    def rhs(f: np.ndarray) -> np.ndarray:
        _check_finite(f)
        rho = density(f, vgrid)
        nu = model.frequencies(rho, sgrid)
        equil = linearized_maxwellian(rho, vgrid)
        if two_dim:
            drift = transport_2d(f, vgrid, sgrid, scheme)
            relax = (nu / eps)[:, :, None, None] * (equil - f)
        else:
            drift = transport_1d(f, vgrid, sgrid, scheme)
            relax = (nu / eps)[:, None] * (equil - f)
        return relax - drift

    return rhs


def equilibrium_state(rho: np.ndarray, vgrid) -> np.ndarray:
    """Initial node values in local linearized equilibrium for a density."""
    return linearized_maxwellian(rho, vgrid)
