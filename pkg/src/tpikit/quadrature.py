"""Gauss-Hermite velocity grids.

Velocities are discretized with the probabilists' Gauss-Hermite rule, so
discrete moments are integrals against the standard Gaussian measure.  Node
values of a distribution are understood relative to that measure: the weights
already contain the Gaussian factor and sum to one.
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite_e import hermegauss


@dataclass(frozen=True)
class VelocityGrid1D:
    """Quadrature nodes and unit-mass weights on the velocity axis."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return self.nodes.size

    @property
    def max_speed(self) -> float:
        return float(np.max(np.abs(self.nodes)))


@dataclass(frozen=True)
class VelocityGrid2D:
    """Tensor product of two identical 1D rules.

    ``weights`` is the (J, J) outer product, so a full 2D moment is a single
    contraction against it.
    """

    nodes_x: np.ndarray
    nodes_y: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return self.nodes_x.size

    @property
    def max_speed(self) -> float:
        return float(np.max(np.abs(self.nodes_x)))


def gauss_hermite_1d(n_nodes: int) -> VelocityGrid1D:
    """Build the probabilists' Gauss-Hermite rule with ``n_nodes`` points.

    The rule is exact against the standard Gaussian for polynomials up to
    degree ``2 * n_nodes - 1``.  Nodes and weights are symmetrized by mirror
    averaging so that the grid is exactly even: odd moments vanish
    identically rather than to rounding, which downstream code relies on
    when it treats the discrete second moment as exactly one.
    """
    if n_nodes < 1:
        raise ValueError("need at least one quadrature node")
    nodes, weights = hermegauss(n_nodes)
    weights = weights / math.sqrt(2.0 * math.pi)
    order = np.argsort(nodes)
    nodes = nodes[order]
    weights = weights[order]
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    return VelocityGrid1D(nodes, weights)


def gauss_hermite_2d(n_nodes: int) -> VelocityGrid2D:
    """Tensor-product rule with ``n_nodes`` points per velocity axis."""
    base = gauss_hermite_1d(n_nodes)
    return VelocityGrid2D(
        nodes_x=base.nodes.copy(),
        nodes_y=base.nodes.copy(),
        weights=np.outer(base.weights, base.weights),
    )
