"""The asymptotic profile law along a single ray.

In slow time tau the ray amplitude P obeys

    dP/dtau = -(f_hat / 2) |P|^2 P,       P(0) = p0,

where f_hat is the null-circle value of the nonlinearity in the ray's
direction.  The flow has a closed form: the modulus follows the separable
law 1/|P|^2 = 1/|p0|^2 + Re(f_hat) tau and the phase winds by an elementary
integral.  Production code uses the closed form; the fixed-step integrator
exists as an independent route for cross-checks.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, StepError

__all__ = [
    "ProfileParams",
    "ProfileFunction",
    "explicit_profile",
    "phase_theta",
    "integrate_profile",
    "integrate_profile_values",
    "modulus_bound",
    "blow_up_time",
]


@dataclass(frozen=True)
class ProfileParams:
    """One ray's data: the circle value f_hat and the initial profile p0."""

    f_hat: complex
    p0: complex


def _radicand(f_hat, p0, tau):
    return 1.0 + np.real(f_hat) * np.abs(p0) ** 2 * np.asarray(tau, dtype=float)


def phase_theta(params: ProfileParams, tau: float) -> float:
    """Accumulated phase Theta(tau) of the closed-form flow.

    For Re f_hat nonzero this is (Im f_hat / (2 Re f_hat)) log(1 + Re
    f_hat |p0|^2 tau); on the conservative line Re f_hat = 0 it
    degenerates to the linear drift (Im f_hat / 2) |p0|^2 tau.
    """
    f, p0 = complex(params.f_hat), complex(params.p0)
    re, im = f.real, f.imag
    if re == 0.0:
        return 0.5 * im * abs(p0) ** 2 * float(tau)
    arg = _radicand(f, p0, tau)
    if arg <= 0.0:
        raise DomainError(
            f"phase log argument {arg!r} <= 0 at tau={tau!r}; profile blow-up time passed"
        )
    return float(im / (2.0 * re) * np.log(arg))


def explicit_profile(params: ProfileParams, tau: float) -> complex:
    """P(tau) by the closed form: p0 exp(-i Theta) / sqrt(1 + Re f_hat |p0|^2 tau)."""
    f, p0 = complex(params.f_hat), complex(params.p0)
    if p0 == 0:
        return 0j
    rad = _radicand(f, p0, tau)
    if rad <= 0.0:
        raise DomainError(
            f"radicand {rad!r} <= 0 at tau={tau!r}; "
            f"anti-dissipative profile blow-up (time {blow_up_time(params)!r})"
        )
    theta = phase_theta(params, tau)
    return complex(p0 * np.exp(-1j * theta) / np.sqrt(rad))


def modulus_bound(params: ProfileParams, tau: float) -> float:
    """|p0| / sqrt(1 + Re f_hat |p0|^2 tau); exact modulus when Re f_hat >= 0."""
    f, p0 = complex(params.f_hat), complex(params.p0)
    if f.real < 0.0:
        raise DomainError("modulus bound requires Re f_hat >= 0")
    return float(abs(p0) / np.sqrt(_radicand(f, p0, tau)))


def blow_up_time(params: ProfileParams):
    """Profile blow-up time -1/(Re f_hat |p0|^2) for Re f_hat < 0, else None."""
    f, p0 = complex(params.f_hat), complex(params.p0)
    if f.real >= 0.0 or p0 == 0:
        return None
    return -1.0 / (f.real * abs(p0) ** 2)


def _rk4_span(f, p, span: float, dt: float, tau0: float = 0.0):
    """Advance p across span with classical RK4; full steps plus one remainder."""
    half_f = -0.5 * f

    def rhs(state):
        return half_f * np.abs(state) ** 2 * state

    n_full, rem = divmod(span, dt)
    steps = [dt] * int(n_full)
    if rem > 1e-15 * max(span, 1.0):
        steps.append(rem)
    tau = tau0
    for h in steps:
        k1 = rhs(p)
        k2 = rhs(p + 0.5 * h * k1)
        k3 = rhs(p + 0.5 * h * k2)
        k4 = rhs(p + h * k3)
        p = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        tau += h
        if not np.all(np.isfinite(p)):
            raise StepError(f"profile integration lost finiteness at tau={tau!r}")
    return p


def integrate_profile_values(f_hat, p0, tau_end: float, dt: float):
    """Classical 4th-order fixed-step integration, vectorized over parameters.

    f_hat and p0 broadcast; returns P(tau_end) with the broadcast shape.
    """
    if dt <= 0.0:
        raise DomainError("dt must be positive")
    if tau_end < 0.0:
        raise DomainError("tau_end must be nonnegative")
    f = np.asarray(f_hat, dtype=complex)
    p = np.array(np.broadcast_arrays(np.asarray(p0, dtype=complex), f)[0], dtype=complex)
    return _rk4_span(f, p, tau_end, dt)


def integrate_profile(params: ProfileParams, tau_end: float, dt: float) -> complex:
    """Scalar wrapper around integrate_profile_values."""
    return complex(integrate_profile_values(params.f_hat, params.p0, tau_end, dt))


def integrate_profile_batch(f_hats, p0s, tau_ends, dt: float = 1e-3):
    """Integrate many (f_hat, p0, tau_end) cases in one shared sweep.

    The flow is autonomous, so every case can ride the same time axis:
    sort by horizon, march the whole stack together, and peel each case
    off as its tau_end is reached.  One pass to the largest horizon
    replaces a pass per case, which is what makes large random batteries
    affordable at small dt.
    """
    if dt <= 0.0:
        raise DomainError("dt must be positive")
    f = np.atleast_1d(np.asarray(f_hats, dtype=complex))
    p = np.atleast_1d(np.asarray(p0s, dtype=complex))
    taus = np.atleast_1d(np.asarray(tau_ends, dtype=float))
    if not (f.shape == p.shape == taus.shape) or f.ndim != 1:
        raise DomainError("f_hats, p0s, tau_ends must be 1-d and the same length")
    if taus.size and float(taus.min()) < 0.0:
        raise DomainError("tau_end must be nonnegative")
    order = np.argsort(taus, kind="stable")
    state = p[order].copy()
    f_sorted = f[order]
    out = np.empty_like(state)
    tau_now = 0.0
    k = 0
    while k < order.size:
        target = float(taus[order[k]])
        if target > tau_now:
            state[k:] = _rk4_span(f_sorted[k:], state[k:], target - tau_now, dt, tau0=tau_now)
            tau_now = target
        while k < order.size and float(taus[order[k]]) <= tau_now:
            out[k] = state[k]
            k += 1
    result = np.empty_like(out)
    result[order] = out
    return result


class ProfileFunction:
    """P0 samples on a (sigma, omega) grid, evolvable by the closed form.

    p0_values has shape (len(sigma_grid), len(omega_grid)); f_hat_values is
    the circle trace of the parent nonlinearity at the grid angles, needed
    to evolve the profile off tau = 0.
    """

    def __init__(self, sigma_grid, omega_grid, p0_values, f_hat_values=None, tau: float = 0.0):
        self.sigma_grid = np.asarray(sigma_grid, dtype=float)
        self.omega_grid = np.asarray(omega_grid, dtype=float)
        self.p0_values = np.asarray(p0_values, dtype=complex)
        if self.p0_values.shape != (self.sigma_grid.size, self.omega_grid.size):
            raise DomainError(
                f"p0_values shape {self.p0_values.shape} does not match grids "
                f"({self.sigma_grid.size}, {self.omega_grid.size})"
            )
        if f_hat_values is None:
            f_hat_values = np.zeros(self.omega_grid.size, dtype=complex)
        self.f_hat_values = np.asarray(f_hat_values, dtype=complex)
        if tau < 0.0:
            raise DomainError("tau must be nonnegative")
        self.tau = float(tau)

    def at(self, tau: float) -> np.ndarray:
        """Evolved profile values P(tau, sigma, omega) via the closed form."""
        out = np.empty_like(self.p0_values)
        for j, f in enumerate(self.f_hat_values):
            for i in range(self.sigma_grid.size):
                out[i, j] = explicit_profile(ProfileParams(f, self.p0_values[i, j]), tau)
        return out

    def envelope_sup(self, eps: float, mu: float) -> float:
        """Empirical sup of |P0| <sigma>^{1-mu} / eps over the grid (diagnostic)."""
        w = (1.0 + self.sigma_grid**2) ** ((1.0 - mu) / 2.0)
        return float(np.max(np.abs(self.p0_values) * w[:, None]) / eps)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["sigma", "theta", "re_p0", "im_p0"])
        for i, s in enumerate(self.sigma_grid):
            for j, th in enumerate(self.omega_grid):
                v = self.p0_values[i, j]
                w.writerow(
                    [repr(float(s)), repr(float(th)), repr(float(v.real)), repr(float(v.imag))]
                )
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, f_hat_values=None) -> "ProfileFunction":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["sigma", "theta", "re_p0", "im_p0"]:
            raise DomainError("profile CSV must have header sigma,theta,re_p0,im_p0")
        sig, th, val = [], [], {}
        for s, t, re, im in rows[1:]:
            s, t = float(s), float(t)
            if s not in sig:
                sig.append(s)
            if t not in th:
                th.append(t)
            val[(s, t)] = complex(float(re), float(im))
        p0 = np.array([[val[(s, t)] for t in th] for s in sig], dtype=complex)
        return cls(np.array(sig), np.array(th), p0, f_hat_values=f_hat_values)
