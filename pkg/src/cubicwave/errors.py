"""Typed failure modes shared across the package.

Every raise carries enough context to reproduce the offending call; the
classes exist so callers can tell an out-of-domain request apart from a
numerical breakdown or an analysis window that cannot support a fit.
"""


class CubicwaveError(Exception):
    """Base class for all package errors."""


class ConfigError(CubicwaveError):
    """Invalid or inconsistent configuration (grids, data, presets, files)."""


class DomainError(CubicwaveError):
    """A formula was evaluated outside its domain of validity."""


class StepError(CubicwaveError):
    """Time integration produced a non-finite state."""


class TailError(CubicwaveError):
    """A truncated improper integral cannot meet the requested tail bound."""


class FitError(CubicwaveError):
    """Residuals are at or below noise floor, no meaningful fit exists."""


class WindowError(CubicwaveError):
    """Requested analysis window is empty or too short to discriminate."""


class UnwrapError(CubicwaveError):
    """Phase samples are too sparse to unwrap reliably."""


class RangeError(CubicwaveError):
    """Requested point lies outside the stored sample range."""


class BlowupDetected(CubicwaveError):
    """Field amplitude exceeded the blow-up threshold or became non-finite.

    Carries the detection time in ``time`` so runners can record it.
    """

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = time
