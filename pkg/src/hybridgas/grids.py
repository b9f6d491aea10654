"""Spatial and velocity grids.

Space is a uniform 1D cell-centered mesh. Velocity space is a uniform 3D
Cartesian node set on [-v_max, v_max]^3 with midpoint quadrature weights,
shared by every spatial cell. Distribution values are stored flattened over
velocity nodes, shape (n_cells, n_nodes), C-order over (ix, iy, iz).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import AsymmetricGrid, ConfigError

BOUNDARY_TAGS = ("periodic", "copy", "wall")


def _symmetric_axis(v_max: float, n: int) -> np.ndarray:
    """Midpoint nodes of [-v_max, v_max], bitwise symmetric under negation."""
    dv = 2.0 * v_max / n
    half = (np.arange(n // 2) + 0.5) * dv
    if n % 2 == 0:
        return np.concatenate([-half[::-1], half])
    return np.concatenate([-half[::-1] - 0.5 * dv, [0.0], half + 0.5 * dv])


@dataclass(frozen=True)
class VelocityGrid:
    """Shared 3D velocity lattice with midpoint weights."""

    v_max: float
    n_per_axis: int

    def __post_init__(self):
        if self.v_max <= 0 or self.n_per_axis < 1:
            raise ConfigError("v_max must be > 0 and n_per_axis >= 1")
        axis = _symmetric_axis(self.v_max, self.n_per_axis)
        if np.any(axis + axis[::-1] != 0.0):
            raise AsymmetricGrid("velocity nodes not symmetric under v -> -v")

    @cached_property
    def dv(self) -> float:
        return 2.0 * self.v_max / self.n_per_axis

    @cached_property
    def weight(self) -> float:
        """Quadrature weight dv^3 of one node."""
        return self.dv**3

    @cached_property
    def axis(self) -> np.ndarray:
        return _symmetric_axis(self.v_max, self.n_per_axis)

    @cached_property
    def n_nodes(self) -> int:
        return self.n_per_axis**3

    @cached_property
    def vx(self) -> np.ndarray:
        return np.repeat(self.axis, self.n_per_axis**2)

    @cached_property
    def vy(self) -> np.ndarray:
        return np.tile(np.repeat(self.axis, self.n_per_axis), self.n_per_axis)

    @cached_property
    def vz(self) -> np.ndarray:
        return np.tile(self.axis, self.n_per_axis**2)

    @cached_property
    def sq(self) -> np.ndarray:
        """|v|^2 per node."""
        return self.vx**2 + self.vy**2 + self.vz**2

    @cached_property
    def invariants(self) -> np.ndarray:
        """Collision-invariant basis (n_nodes, 5): 1, vx, vy, vz, |v|^2."""
        one = np.ones(self.n_nodes)
        return np.stack([one, self.vx, self.vy, self.vz, self.sq], axis=1)

    @cached_property
    def conserved_basis(self) -> np.ndarray:
        """Moment basis (n_nodes, 5) for (rho, mom, E): 1, vx, vy, vz, |v|^2/2."""
        b = self.invariants.copy()
        b[:, 4] *= 0.5
        return b

    @cached_property
    def mirror_x(self) -> np.ndarray:
        """Node permutation flipping vx -> -vx (exact, used by specular walls)."""
        n = self.n_per_axis
        idx = np.arange(self.n_nodes).reshape(n, n, n)
        return idx[::-1, :, :].ravel()


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform 1D mesh of n_cells cells on [x_min, x_max]."""

    x_min: float
    x_max: float
    n_cells: int
    boundary: str = "copy"

    def __post_init__(self):
        if self.x_max <= self.x_min or self.n_cells < 1:
            raise ConfigError("need x_max > x_min and n_cells >= 1")
        if self.boundary not in BOUNDARY_TAGS:
            raise ConfigError(f"boundary must be one of {BOUNDARY_TAGS}")

    @cached_property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @cached_property
    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx
