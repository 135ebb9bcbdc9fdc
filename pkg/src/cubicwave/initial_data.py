"""Compactly supported seed profiles for the wave runs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError

__all__ = ["poly_bump", "smooth_bump", "InitialData", "bump_data"]


def poly_bump(
    radius: float = 1.0, power: int = 4, amplitude: float = 1.0
) -> Callable[[np.ndarray], np.ndarray]:
    """amplitude * (1 - (r/R)^2)^power inside r < R, zero outside.

    power=4 gives a C^3 profile, smooth enough for the second-order solver
    to hold its convergence rate.
    """
    if radius <= 0.0:
        raise ConfigError("bump radius must be positive")
    if power < 2:
        raise ConfigError("bump power must be >= 2")

    def profile(r):
        r = np.asarray(r, dtype=float)
        x = np.clip(r / radius, 0.0, 1.0)
        return amplitude * (1.0 - x**2) ** power

    profile.support_radius = radius
    return profile


def smooth_bump(
    radius: float = 1.0, amplitude: float = 1.0
) -> Callable[[np.ndarray], np.ndarray]:
    """amplitude * exp(1 - 1/(1 - (r/R)^2)) inside r < R, zero outside; C^infinity."""
    if radius <= 0.0:
        raise ConfigError("bump radius must be positive")

    def profile(r):
        r = np.asarray(r, dtype=float)
        x2 = (r / radius) ** 2
        out = np.zeros_like(x2)
        inside = x2 < 1.0
        with np.errstate(divide="ignore", over="ignore"):
            out[inside] = np.exp(1.0 - 1.0 / (1.0 - x2[inside]))
        return amplitude * out

    profile.support_radius = radius
    return profile


@dataclass(frozen=True)
class InitialData:
    """Position and velocity seeds as functions of radius.

    Both callables take an array of radii and return real or complex values;
    the solver multiplies by the run amplitude eps itself.
    """

    f: Callable[[np.ndarray], np.ndarray]
    g: Callable[[np.ndarray], np.ndarray]
    support_radius: float

    def __post_init__(self):
        if self.support_radius <= 0.0:
            raise ConfigError("support_radius must be positive")


def _zero(r):
    return np.zeros_like(np.asarray(r, dtype=float))


def bump_data(
    radius: float = 1.0,
    shape: str = "poly",
    velocity: str | Callable | None = "match",
    amplitude: float = 1.0,
) -> InitialData:
    """Standard seed: a bump of the given support radius.

    velocity="match" reuses the position profile for the velocity (a run
    that radiates from the start), None means zero velocity, and a callable
    is used as-is.  The amplitude knob sets where the slow-time damping
    becomes order one: the ray amplitude scales with eps * amplitude, and
    the log-decay regime only opens once its square times log t is O(1).
    """
    if shape == "poly":
        f = poly_bump(radius, amplitude=amplitude)
    elif shape == "smooth":
        f = smooth_bump(radius, amplitude=amplitude)
    else:
        raise ConfigError(f"unknown bump shape {shape!r}")
    if velocity == "match":
        g = f
    elif velocity is None:
        g = _zero
    elif callable(velocity):
        g = velocity
    else:
        raise ConfigError(f"velocity must be 'match', None, or callable, got {velocity!r}")
    return InitialData(f=f, g=g, support_radius=radius)
