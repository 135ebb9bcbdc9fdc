"""Run observers: traces and ray samplers hooked into the solver loop.

Every observer is a callable (solver, n, t, u_prev, u_curr, u_next); the
solver fires them after computing u_next and before rotating buffers, so
u_curr sits at time t with both neighbors available and centered time
derivatives cost nothing.  Observers copy whatever they keep; the buffers
mutate in place.
"""

from __future__ import annotations

import numpy as np

from .errors import RangeError
from .grids import RadialGrid
from . import stepper

__all__ = [
    "EnergyRecorder",
    "DerivativeSupTrace",
    "RaySampler",
    "SnapshotSaver",
    "CenterProbe",
    "BoundaryWatchdog",
    "cubic_interp",
    "radial_center_value",
]


def cubic_interp(values, x: float):
    """4-point Lagrange interpolation of unit-spaced samples at fractional x.

    values[k] sits at index k; x must allow a full stencil (1 <= x <= len-2
    after clamping the base node).
    """
    j1 = int(np.floor(x))
    j1 = min(max(j1, 1), len(values) - 3)
    s = x - j1
    w_m1 = -s * (s - 1.0) * (s - 2.0) / 6.0
    w_0 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0
    w_1 = -(s + 1.0) * s * (s - 2.0) / 2.0
    w_2 = (s + 1.0) * s * (s - 1.0) / 6.0
    return (
        w_m1 * values[j1 - 1] + w_0 * values[j1] + w_1 * values[j1 + 1] + w_2 * values[j1 + 2]
    )


def radial_center_value(u, dr: float) -> complex:
    """Field value at r = 0 from the two innermost cells (even extrapolation)."""
    return complex((9.0 * u[0] - u[1]) / 8.0)


def _staggered_energy(solver, u_a, u_b):
    if isinstance(solver.grid, RadialGrid):
        return stepper.radial_energy_staggered(u_a, u_b, solver.dt, solver.grid)
    return stepper.planar_energy_staggered(u_a, u_b, solver.dt, solver.grid)


class EnergyRecorder:
    """Records the staggered energy E^{n+1/2} every `every` steps."""

    def __init__(self, every: int = 100):
        self.every = max(int(every), 1)
        self.times: list[float] = []
        self.values: list[float] = []

    def __call__(self, solver, n, t, u_prev, u_curr, u_next):
        if n % self.every:
            return
        self.times.append(t + 0.5 * solver.dt)
        self.values.append(_staggered_energy(solver, u_curr, u_next))

    def arrays(self):
        return np.asarray(self.times), np.asarray(self.values)


class DerivativeSupTrace:
    """Records sup_x |du(t, x)| (time and space parts together), radial only."""

    def __init__(self, every: int = 100):
        self.every = max(int(every), 1)
        self.times: list[float] = []
        self.values: list[float] = []

    def __call__(self, solver, n, t, u_prev, u_curr, u_next):
        if n % self.every:
            return
        v = (u_next - u_prev) / (2.0 * solver.dt)
        ur = stepper.radial_gradient(u_curr, solver.grid.dr)
        sup = float(np.sqrt(np.max(np.abs(v) ** 2 + np.abs(ur) ** 2)))
        self.times.append(t)
        self.values.append(sup)

    def arrays(self):
        return np.asarray(self.times), np.asarray(self.values)


class RaySampler:
    """Samples the outgoing signal U = (d_r - d_t)(sqrt(r) u)/2 at r = t + sigma.

    The sample point rides an outgoing characteristic at offset sigma from
    the light cone.  Values are interpolated to the exact radius with a
    cubic stencil; recording starts once the ray is far enough from the
    axis (t >= max(2, -2 sigma)) and stops if it nears the outer boundary.
    """

    def __init__(self, sigma: float, every: int = 20, boundary_margin: int = 6):
        self.sigma = float(sigma)
        self.every = max(int(every), 1)
        self.boundary_margin = int(boundary_margin)
        self.times: list[float] = []
        self.values: list[complex] = []
        self.du_values: list[tuple] = []  # raw (d_t u, d_r u, 0) at the same point

    def __call__(self, solver, n, t, u_prev, u_curr, u_next):
        if n % self.every:
            return
        if t < max(2.0, -2.0 * self.sigma):
            return
        grid = solver.grid
        r_star = t + self.sigma
        dr = grid.dr
        x = r_star / dr - 0.5  # fractional cell index
        j1 = int(np.floor(x))
        lo = j1 - 2
        hi = j1 + 4  # exclusive; 6 cells so the derivative window has neighbors
        if lo < 0 or hi > grid.n_r - self.boundary_margin:
            return
        r_win = grid.r[lo:hi]
        sq = np.sqrt(r_win)
        w_curr = sq * u_curr[lo:hi]
        v_win = (u_next[lo:hi] - u_prev[lo:hi]) / (2.0 * solver.dt)
        w_r = (w_curr[2:] - w_curr[:-2]) / (2.0 * dr)  # at cells lo+1 .. hi-2
        u_r = (u_curr[lo + 2 : hi] - u_curr[lo : hi - 2]) / (2.0 * dr)
        w_t = sq[1:-1] * v_win[1:-1]
        ray = 0.5 * (w_r - w_t)
        # interpolation nodes are lo+1 .. hi-2, i.e. 4 cells around x
        x_local = x - (lo + 1)
        self.times.append(t)
        self.values.append(complex(cubic_interp(ray, x_local)))
        self.du_values.append(
            (
                complex(cubic_interp(v_win[1:-1], x_local)),
                complex(cubic_interp(u_r, x_local)),
                0.0j,
            )
        )

    def arrays(self):
        return np.asarray(self.times), np.asarray(self.values, dtype=complex)


class SnapshotSaver:
    """Copies the field (and centered velocity) at the requested times."""

    def __init__(self, times):
        self.targets = sorted(float(t) for t in times)
        self.snapshots: list[tuple[float, np.ndarray, np.ndarray]] = []
        self._next = 0

    def __call__(self, solver, n, t, u_prev, u_curr, u_next):
        if self._next >= len(self.targets):
            return
        if t + 0.5 * solver.dt < self.targets[self._next]:
            return
        v = (u_next - u_prev) / (2.0 * solver.dt)
        self.snapshots.append((t, u_curr.copy(), v))
        self._next += 1


class CenterProbe:
    """Records u at the symmetry point: r=0 (radial) or the center node (planar)."""

    def __init__(self, every: int = 5):
        self.every = max(int(every), 1)
        self.times: list[float] = []
        self.values: list[complex] = []

    def __call__(self, solver, n, t, u_prev, u_curr, u_next):
        if n % self.every:
            return
        if isinstance(solver.grid, RadialGrid):
            val = radial_center_value(u_curr, solver.grid.dr)
        else:
            c = solver.grid.center_index
            val = complex(u_curr[c, c])
        self.times.append(t)
        self.values.append(val)

    def arrays(self):
        return np.asarray(self.times), np.asarray(self.values, dtype=complex)


class BoundaryWatchdog:
    """Fails the run if the wave contaminates the outer boundary.

    Long decay fits silently rot if the outgoing wave reflects back in, so
    reaching the boundary is an error, not a warning.
    """

    def __init__(self, every: int = 200, cells: int = 8, factor: float = 1e-6):
        self.every = max(int(every), 1)
        self.cells = int(cells)
        self.factor = float(factor)

    def __call__(self, solver, n, t, u_prev, u_curr, u_next):
        if n % self.every:
            return
        edge = float(np.max(np.abs(u_curr[-self.cells :])))
        if edge > self.factor * solver.eps:
            raise RangeError(
                f"wave reached the outer boundary (|u| = {edge:.3e} at t = {t:.1f});"
                " enlarge r_max or shorten the run"
            )
