"""Spatial grids for the axisymmetric and full planar wave solvers."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

__all__ = ["RadialGrid", "CartesianGrid2D"]


@dataclass(frozen=True)
class RadialGrid:
    """Uniform cell-centered grid on (0, r_max].

    Centers sit at r_j = (j + 1/2) dr, so no point lands on the axis: the
    finite-volume flux through the r = 0 face vanishes by the r-weight alone
    and the axis needs no regularized stencil.  This also keeps the discrete
    Laplacian's spectral radius essentially at the Cartesian value, so time
    steps close to dr remain stable.
    """

    n_r: int
    r_max: float

    def __post_init__(self):
        if self.n_r < 4:
            raise ConfigError(f"n_r={self.n_r!r} too small")
        if self.r_max <= 0.0:
            raise ConfigError(f"r_max={self.r_max!r} must be positive")

    @property
    def dr(self) -> float:
        return self.r_max / self.n_r

    @property
    def r(self) -> np.ndarray:
        return (np.arange(self.n_r) + 0.5) * self.dr

    @property
    def r_faces(self) -> np.ndarray:
        """Cell-face radii, length n_r + 1; first face is the axis."""
        return np.arange(self.n_r + 1) * self.dr

    @property
    def cell_volumes(self) -> np.ndarray:
        """2 pi r_j dr, the midpoint-rule measure for radial integrals."""
        return 2.0 * math.pi * self.r * self.dr

    def max_dt(self, cfl: float) -> float:
        # every row of the volume-weighted Laplacian has Gershgorin disc
        # [-4/dr^2, 0], same as the 1D stencil, so dt <= dr is the hard limit
        if not (0.0 < cfl < 1.0):
            raise ConfigError(f"cfl={cfl!r} outside (0, 1)")
        return cfl * self.dr

    def index_of(self, r: float) -> int:
        j = int(round(r / self.dr - 0.5))
        return min(max(j, 0), self.n_r - 1)


@dataclass(frozen=True)
class CartesianGrid2D:
    """Square node-centered grid on [-half_width, half_width]^2, n odd.

    Odd n puts a node exactly at the origin, which is where the radial and
    planar runs are compared.
    """

    n: int
    half_width: float
    periodic: bool = False

    def __post_init__(self):
        if self.n < 5 or self.n % 2 == 0:
            raise ConfigError(f"n={self.n!r} must be odd and >= 5")
        if self.half_width <= 0.0:
            raise ConfigError(f"half_width={self.half_width!r} must be positive")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / (self.n - 1)

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.n)

    @property
    def center_index(self) -> int:
        return (self.n - 1) // 2

    def meshgrid(self):
        x = self.axis
        return np.meshgrid(x, x, indexing="ij")

    @property
    def radius(self) -> np.ndarray:
        xx, yy = self.meshgrid()
        return np.hypot(xx, yy)

    def max_dt(self, cfl: float) -> float:
        # 2D five-point stencil is stable up to dx/sqrt(2); cap below that
        # 5-point stencil limit is dt <= dx/sqrt(2) ~ 0.707 dx
        if not (0.0 < cfl <= 0.7):
            raise ConfigError(f"cfl={cfl!r} outside (0, 0.7]")
        return cfl * self.dx
