"""Wave solvers: axisymmetric (primary) and full planar (cross-check).

Both integrate u_tt = Lap u + F(u_t, grad u) with leapfrog, started by a
second-order Taylor expansion off the initial data.  The radial solver is
the one used for long decay studies; the planar solver exists to confirm
that nothing about the axisymmetric reduction is load-bearing.
"""

from __future__ import annotations

import numpy as np

from .errors import BlowupDetected, ConfigError
from .grids import CartesianGrid2D, RadialGrid
from .initial_data import InitialData
from .nonlinearity import CubicNonlinearity, rotation_invariance_defect
from . import stepper

__all__ = ["RadialWaveSolver", "PlanarWaveSolver"]

# cells across the seed's support below which the run is refused
MIN_CELLS_ACROSS_SUPPORT = 32

_ROTATION_DEFECT_TOL = 1e-8


class RadialWaveSolver:
    """Leapfrog evolution of an axisymmetric complex field.

    State advances on u(t_n); after each step observers fire with the
    three levels (n-1, n, n+1) so centered time derivatives at t_n come
    for free.  The cubic form must be rotation invariant in the sampled
    sense, otherwise running it radially would silently change the
    problem; that is checked at construction.
    """

    def __init__(
        self,
        grid: RadialGrid,
        nonlinearity: CubicNonlinearity,
        data: InitialData,
        eps: float,
        cfl: float = 0.5,
        use_numba: bool = True,
    ):
        if eps <= 0.0:
            raise ConfigError(f"eps={eps!r} must be positive")
        cells = data.support_radius / grid.dr
        if cells < MIN_CELLS_ACROSS_SUPPORT:
            raise ConfigError(
                f"support spans {cells:.1f} cells, need >= {MIN_CELLS_ACROSS_SUPPORT};"
                " refine the grid or widen the seed"
            )
        defect = rotation_invariance_defect(nonlinearity)
        if defect > _ROTATION_DEFECT_TOL:
            raise ConfigError(
                f"cubic form varies with angle (defect {defect:.2e}); radial reduction"
                " would change the dynamics, use the planar solver"
            )
        self.grid = grid
        self.nonlinearity = nonlinearity
        self.eps = float(eps)
        self.dt = grid.max_dt(cfl)
        self.use_numba = bool(use_numba) and stepper.HAVE_NUMBA
        self._terms = stepper.radial_term_arrays(nonlinearity)

        r = grid.r
        u0 = np.asarray(eps * data.f(r), dtype=complex)
        v0 = np.asarray(eps * data.g(r), dtype=complex)
        lap0 = stepper.radial_laplacian(u0, grid.dr)
        ur0 = stepper.radial_gradient(u0, grid.dr)
        f0 = stepper.cubic_terms((v0, ur0), *self._terms)
        u1 = u0 + self.dt * v0 + 0.5 * self.dt**2 * (lap0 + f0)

        self.u_prev = u0
        self.u_curr = u1
        self._u_next = np.empty_like(u0)
        self.n = 1
        self.initial_energy = stepper.radial_energy(u0, v0, grid)

    @property
    def t(self) -> float:
        return self.n * self.dt

    def velocity(self) -> np.ndarray:
        """Backward-difference velocity at the current level (first order)."""
        return (self.u_curr - self.u_prev) / self.dt

    def energy(self) -> float:
        """Staggered energy on the trailing half step."""
        return stepper.radial_energy_staggered(self.u_prev, self.u_curr, self.dt, self.grid)

    def _advance(self):
        coef, ia, ib, ic = self._terms
        stepper.step_radial(
            self.u_prev, self.u_curr, self._u_next, self.grid.dr, self.dt, coef, ia, ib, ic,
            use_numba=self.use_numba,
        )

    def step(self):
        self._advance()
        self.u_prev, self.u_curr, self._u_next = self.u_curr, self._u_next, self.u_prev
        self.n += 1

    def run(self, t_end: float, observers=(), blowup_factor: float = 1e6, check_interval: int = 100):
        """Advance to t_end, firing observers after every step.

        Observers are callables (solver, n, t, u_prev, u_curr, u_next);
        they see the state at t_n with its neighbors.  Raises
        BlowupDetected when the sup norm passes blowup_factor * eps or
        loses finiteness (checked every check_interval steps).
        """
        cap = blowup_factor * self.eps
        n_steps = int(round(t_end / self.dt)) - self.n
        for _ in range(max(n_steps, 0)):
            self._advance()
            for obs in observers:
                obs(self, self.n, self.t, self.u_prev, self.u_curr, self._u_next)
            self.u_prev, self.u_curr, self._u_next = self.u_curr, self._u_next, self.u_prev
            self.n += 1
            if self.n % check_interval == 0:
                peak = float(np.max(np.abs(self.u_curr)))
                if not np.isfinite(peak) or peak > cap:
                    raise BlowupDetected(
                        f"sup |u| = {peak!r} at t = {self.t!r} (cap {cap!r})", time=self.t
                    )
        return self


class PlanarWaveSolver:
    """Leapfrog evolution on the full 2D grid; no symmetry assumed."""

    def __init__(
        self,
        grid: CartesianGrid2D,
        nonlinearity: CubicNonlinearity,
        f_xy,
        g_xy,
        eps: float,
        cfl: float = 0.45,
    ):
        if eps <= 0.0:
            raise ConfigError(f"eps={eps!r} must be positive")
        self.grid = grid
        self.nonlinearity = nonlinearity
        self.eps = float(eps)
        self.dt = grid.max_dt(cfl)
        self._terms = stepper.planar_term_arrays(nonlinearity)

        xx, yy = grid.meshgrid()
        u0 = np.asarray(eps * f_xy(xx, yy), dtype=complex)
        v0 = np.asarray(eps * g_xy(xx, yy), dtype=complex)
        if not grid.periodic:
            for a in (u0, v0):
                a[0, :] = a[-1, :] = 0.0
                a[:, 0] = a[:, -1] = 0.0
        lap0 = stepper.planar_laplacian(u0, grid.dx, grid.periodic)
        ux0, uy0 = stepper.planar_gradients(u0, grid.dx, grid.periodic)
        f0 = stepper.cubic_terms((v0, ux0, uy0), *self._terms)
        u1 = u0 + self.dt * v0 + 0.5 * self.dt**2 * (lap0 + f0)
        if not grid.periodic:
            u1[0, :] = u1[-1, :] = 0.0
            u1[:, 0] = u1[:, -1] = 0.0

        self.u_prev = u0
        self.u_curr = u1
        self._u_next = np.empty_like(u0)
        self.n = 1
        self.initial_energy = stepper.planar_energy(u0, v0, grid)

    @classmethod
    def from_radial_data(cls, grid, nonlinearity, data: InitialData, eps, cfl=0.45):
        """Spin a radial seed onto the planar grid for cross-checks."""
        cells = data.support_radius / grid.dx
        if cells < MIN_CELLS_ACROSS_SUPPORT:
            raise ConfigError(
                f"support spans {cells:.1f} cells, need >= {MIN_CELLS_ACROSS_SUPPORT}"
            )

        def f_xy(xx, yy):
            return data.f(np.hypot(xx, yy))

        def g_xy(xx, yy):
            return data.g(np.hypot(xx, yy))

        return cls(grid, nonlinearity, f_xy, g_xy, eps, cfl=cfl)

    @property
    def t(self) -> float:
        return self.n * self.dt

    def energy(self) -> float:
        return stepper.planar_energy_staggered(self.u_prev, self.u_curr, self.dt, self.grid)

    def center_value(self) -> complex:
        c = self.grid.center_index
        return complex(self.u_curr[c, c])

    def step(self):
        coef, ia, ib, ic = self._terms
        stepper.step_planar(
            self.u_prev, self.u_curr, self._u_next, self.grid.dx, self.dt,
            coef, ia, ib, ic, periodic=self.grid.periodic,
        )
        self.u_prev, self.u_curr, self._u_next = self.u_curr, self._u_next, self.u_prev
        self.n += 1

    def run(self, t_end: float, observers=(), blowup_factor: float = 1e6, check_interval: int = 50):
        cap = blowup_factor * self.eps
        coef, ia, ib, ic = self._terms
        n_steps = int(round(t_end / self.dt)) - self.n
        for _ in range(max(n_steps, 0)):
            stepper.step_planar(
                self.u_prev, self.u_curr, self._u_next, self.grid.dx, self.dt,
                coef, ia, ib, ic, periodic=self.grid.periodic,
            )
            for obs in observers:
                obs(self, self.n, self.t, self.u_prev, self.u_curr, self._u_next)
            self.u_prev, self.u_curr, self._u_next = self.u_curr, self._u_next, self.u_prev
            self.n += 1
            if self.n % check_interval == 0:
                peak = float(np.max(np.abs(self.u_curr)))
                if not np.isfinite(peak) or peak > cap:
                    raise BlowupDetected(
                        f"sup |u| = {peak!r} at t = {self.t!r} (cap {cap!r})", time=self.t
                    )
        return self
