"""Leapfrog time steppers and discrete energies.

The radial stepper is the workhorse: a finite-volume Laplacian on the
cell-centered grid, leapfrog in time, and a one-shot predictor-corrector
for the velocity entering the cubic term (plain leapfrog needs the
velocity at the current level, which leapfrog does not carry).  The
corrector is point-local, so the whole update fuses into a single pass
per cell; with numba this is what makes the long decay runs affordable
on one core.  A pure-numpy fallback keeps everything runnable without
numba at reduced speed.

Velocities use the same one-sided predictor everywhere:
    v_pred = (u^n - u^{n-1}) / dt,
then one corrector with the centered difference through the predicted
point.  Both differences are second-order consistent at the half step,
and the corrector restores second order at the full step.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConfigError

try:  # pragma: no cover - exercised implicitly by which path runs
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

__all__ = [
    "HAVE_NUMBA",
    "radial_term_arrays",
    "planar_term_arrays",
    "cubic_terms",
    "step_radial",
    "step_planar",
    "radial_laplacian",
    "radial_gradient",
    "planar_laplacian",
    "planar_gradients",
    "radial_energy",
    "radial_energy_staggered",
    "planar_energy",
    "planar_energy_staggered",
]


def cubic_terms(qs, coef, ia, ib, ic):
    """Sum coef * q_a q_b conj(q_c) over the flattened term list (array-valued)."""
    acc = np.zeros_like(qs[0], dtype=complex)
    for m in range(coef.size):
        acc += coef[m] * qs[ia[m]] * qs[ib[m]] * np.conj(qs[ic[m]])
    return acc


def radial_term_arrays(nonlinearity):
    """Flatten the cubic tensor for the radial kernel.

    On an axisymmetric field evaluated along the +x axis the angular
    gradient component vanishes, so every term touching index 2 drops
    and the kernel only sees indices {0, 1} = (time, radial).
    """
    coef, ia, ib, ic = [], [], [], []
    p = nonlinearity.coefficients
    for a in range(3):
        for b in range(3):
            for c in range(3):
                if p[a, b, c] != 0 and a != 2 and b != 2 and c != 2:
                    coef.append(p[a, b, c])
                    ia.append(a)
                    ib.append(b)
                    ic.append(c)
    return (
        np.asarray(coef, dtype=complex),
        np.asarray(ia, dtype=np.int64),
        np.asarray(ib, dtype=np.int64),
        np.asarray(ic, dtype=np.int64),
    )


def planar_term_arrays(nonlinearity):
    coef, ia, ib, ic = [], [], [], []
    p = nonlinearity.coefficients
    for a in range(3):
        for b in range(3):
            for c in range(3):
                if p[a, b, c] != 0:
                    coef.append(p[a, b, c])
                    ia.append(a)
                    ib.append(b)
                    ic.append(c)
    return (
        np.asarray(coef, dtype=complex),
        np.asarray(ia, dtype=np.int64),
        np.asarray(ib, dtype=np.int64),
        np.asarray(ic, dtype=np.int64),
    )


# -- radial kernel ---------------------------------------------------------


def _radial_shifts(u):
    up = np.empty_like(u)
    up[:-1] = u[1:]
    up[-1] = -u[-1]  # zero at the outer face
    um = np.empty_like(u)
    um[1:] = u[:-1]
    um[0] = u[0]  # even across the axis; j=0 flux has zero weight anyway
    return up, um


def radial_laplacian(u, dr):
    """Finite-volume polar Laplacian on cell centers (same ghosts as the kernel)."""
    up, um = _radial_shifts(u)
    j = np.arange(u.size, dtype=float)
    return ((j + 1.0) * (up - u) - j * (u - um)) / ((j + 0.5) * dr * dr)


def radial_gradient(u, dr):
    up, um = _radial_shifts(u)
    return (up - um) / (2.0 * dr)


def _step_radial_numpy(u_prev, u_curr, u_next, dr, dt, coef, ia, ib, ic):
    up, um = _radial_shifts(u_curr)
    j = np.arange(u_curr.size, dtype=float)
    lap = ((j + 1.0) * (up - u_curr) - j * (u_curr - um)) / ((j + 0.5) * dr * dr)
    ur = (up - um) / (2.0 * dr)
    base = 2.0 * u_curr - u_prev + dt * dt * lap

    def cubic(v):
        if coef.size == 0:
            return 0.0
        qs = (v, ur)
        acc = np.zeros_like(v)
        for m in range(coef.size):
            acc += coef[m] * qs[ia[m]] * qs[ib[m]] * np.conj(qs[ic[m]])
        return acc

    v = (u_curr - u_prev) / dt
    star = base + dt * dt * cubic(v)
    v = (star - u_prev) / (2.0 * dt)
    u_next[:] = base + dt * dt * cubic(v)


if HAVE_NUMBA:

    @numba.njit(cache=True, fastmath=True, inline="always")
    def _cubic_pt(q0, q1, coef, ia, ib, ic):
        acc = 0.0 + 0.0j
        for m in range(coef.shape[0]):
            qa = q0 if ia[m] == 0 else q1
            qb = q0 if ib[m] == 0 else q1
            qc = q0 if ic[m] == 0 else q1
            acc = acc + coef[m] * qa * qb * qc.conjugate()
        return acc

    @numba.njit(cache=True, fastmath=True)
    def _step_radial_numba(u_prev, u_curr, u_next, dr, dt, coef, ia, ib, ic):
        n = u_curr.shape[0]
        dt2 = dt * dt
        inv_dt = 1.0 / dt
        inv_2dt = 0.5 / dt
        inv_2dr = 0.5 / dr
        inv_dr2 = 1.0 / (dr * dr)
        for j in range(n):
            uc = u_curr[j]
            um = u_curr[j - 1] if j > 0 else uc
            up = u_curr[j + 1] if j < n - 1 else -uc
            lap = ((j + 1.0) * (up - uc) - j * (uc - um)) * inv_dr2 / (j + 0.5)
            base = 2.0 * uc - u_prev[j] + dt2 * lap
            if coef.shape[0] == 0:
                u_next[j] = base
                continue
            ur = (up - um) * inv_2dr
            v = (uc - u_prev[j]) * inv_dt
            star = base + dt2 * _cubic_pt(v, ur, coef, ia, ib, ic)
            v = (star - u_prev[j]) * inv_2dt
            u_next[j] = base + dt2 * _cubic_pt(v, ur, coef, ia, ib, ic)


def step_radial(u_prev, u_curr, u_next, dr, dt, coef, ia, ib, ic, use_numba=True):
    """One leapfrog step of the radial field; writes into u_next."""
    if HAVE_NUMBA and use_numba:
        _step_radial_numba(u_prev, u_curr, u_next, dr, dt, coef, ia, ib, ic)
    else:
        _step_radial_numpy(u_prev, u_curr, u_next, dr, dt, coef, ia, ib, ic)


# -- planar kernel ---------------------------------------------------------


def _neighbors(u, periodic):
    if periodic:
        return (
            np.roll(u, -1, axis=0),
            np.roll(u, 1, axis=0),
            np.roll(u, -1, axis=1),
            np.roll(u, 1, axis=1),
        )
    xp = np.zeros_like(u)
    xm = np.zeros_like(u)
    yp = np.zeros_like(u)
    ym = np.zeros_like(u)
    xp[:-1, :] = u[1:, :]
    xm[1:, :] = u[:-1, :]
    yp[:, :-1] = u[:, 1:]
    ym[:, 1:] = u[:, :-1]
    return xp, xm, yp, ym


def planar_laplacian(u, dx, periodic=False):
    xp, xm, yp, ym = _neighbors(u, periodic)
    return (xp + xm + yp + ym - 4.0 * u) / (dx * dx)


def planar_gradients(u, dx, periodic=False):
    xp, xm, yp, ym = _neighbors(u, periodic)
    return (xp - xm) / (2.0 * dx), (yp - ym) / (2.0 * dx)


def step_planar(u_prev, u_curr, u_next, dx, dt, coef, ia, ib, ic, periodic=False):
    """One leapfrog step of the planar field (Dirichlet or periodic edges)."""
    xp, xm, yp, ym = _neighbors(u_curr, periodic)
    lap = (xp + xm + yp + ym - 4.0 * u_curr) / (dx * dx)
    base = 2.0 * u_curr - u_prev + dt * dt * lap

    if coef.size == 0:
        u_next[:] = base
    else:
        ux = (xp - xm) / (2.0 * dx)
        uy = (yp - ym) / (2.0 * dx)

        def cubic(v):
            qs = (v, ux, uy)
            acc = np.zeros_like(v)
            for m in range(coef.size):
                acc += coef[m] * qs[ia[m]] * qs[ib[m]] * np.conj(qs[ic[m]])
            return acc

        v = (u_curr - u_prev) / dt
        star = base + dt * dt * cubic(v)
        v = (star - u_prev) / (2.0 * dt)
        u_next[:] = base + dt * dt * cubic(v)
    if not periodic:
        u_next[0, :] = 0.0
        u_next[-1, :] = 0.0
        u_next[:, 0] = 0.0
        u_next[:, -1] = 0.0


# -- discrete energies -----------------------------------------------------


def _radial_face_grads(u, dr):
    d = np.empty(u.size, dtype=u.dtype)  # faces k = 1 .. n
    d[:-1] = np.diff(u) / dr
    d[-1] = -2.0 * u[-1] / dr  # against the zero at the outer face
    return d


def _radial_face_weights(n, dr):
    # last face takes half weight: that is the form the Laplacian's
    # summation-by-parts identity produces, and what the leapfrog
    # recursion conserves exactly
    w = 2.0 * math.pi * dr * (np.arange(1, n + 1) * dr)
    w[-1] *= 0.5
    return w


def radial_energy(u, v, grid):
    """Instantaneous field energy, midpoint rule with the 2 pi r weight."""
    kin = 0.5 * float(np.sum(grid.cell_volumes * np.abs(v) ** 2))
    d = _radial_face_grads(u, grid.dr)
    grad = 0.5 * float(np.sum(_radial_face_weights(u.size, grid.dr) * np.abs(d) ** 2))
    return kin + grad


def radial_energy_staggered(u_old, u_new, dt, grid):
    """Half-step energy E^{n+1/2}; exactly constant for the linear stepper.

    Kinetic part uses the step difference, gradient part the symmetrized
    product of the two levels, which is what the leapfrog recursion
    telescopes exactly.
    """
    v = (u_new - u_old) / dt
    kin = 0.5 * float(np.sum(grid.cell_volumes * np.abs(v) ** 2))
    da = _radial_face_grads(u_old, grid.dr)
    db = _radial_face_grads(u_new, grid.dr)
    w = _radial_face_weights(u_old.size, grid.dr)
    grad = 0.5 * float(np.sum(w * np.real(db * np.conj(da))))
    return kin + grad


def _planar_edge_diffs(u, periodic):
    if periodic:
        dx_e = np.roll(u, -1, axis=0) - u
        dy_e = np.roll(u, -1, axis=1) - u
    else:
        dx_e = u[1:, :] - u[:-1, :]
        dy_e = u[:, 1:] - u[:, :-1]
    return dx_e, dy_e


def planar_energy(u, v, grid):
    dx = grid.dx
    kin = 0.5 * dx * dx * float(np.sum(np.abs(v) ** 2))
    ex, ey = _planar_edge_diffs(u, grid.periodic)
    grad = 0.5 * float(np.sum(np.abs(ex) ** 2) + np.sum(np.abs(ey) ** 2))
    return kin + grad


def planar_energy_staggered(u_old, u_new, dt, grid):
    dx = grid.dx
    v = (u_new - u_old) / dt
    kin = 0.5 * dx * dx * float(np.sum(np.abs(v) ** 2))
    ax, ay = _planar_edge_diffs(u_old, grid.periodic)
    bx, by = _planar_edge_diffs(u_new, grid.periodic)
    grad = 0.5 * float(np.sum(np.real(bx * np.conj(ax))) + np.sum(np.real(by * np.conj(ay))))
    return kin + grad


def check_kernel_consistency(n=64, seed=0):
    """Drive both radial implementations on random data; max abs difference.

    Used by the test suite to pin the numba path to the numpy reference.
    """
    rng = np.random.default_rng(seed)
    u_prev = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * 0.1
    u_curr = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * 0.1
    coef = np.array([-1.0 + 0.5j, 0.3 - 0.2j], dtype=complex)
    ia = np.array([0, 1], dtype=np.int64)
    ib = np.array([0, 0], dtype=np.int64)
    ic = np.array([0, 1], dtype=np.int64)
    out_a = np.empty_like(u_curr)
    out_b = np.empty_like(u_curr)
    _step_radial_numpy(u_prev, u_curr, out_a, 0.1, 0.05, coef, ia, ib, ic)
    if not HAVE_NUMBA:
        return 0.0
    _step_radial_numba(u_prev, u_curr, out_b, 0.1, 0.05, coef, ia, ib, ic)
    return float(np.max(np.abs(out_a - out_b)))
