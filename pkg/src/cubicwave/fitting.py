"""Least-squares fit plumbing shared by the ODE and PDE analyzers."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import WindowError

__all__ = ["DecayFit", "linear_fit", "loglog_fit"]


@dataclass
class DecayFit:
    """Result of a single decay/rate fit.

    params holds the fitted quantities by name (slope, intercept, r2, ...);
    window is the (t_lo, t_hi) actually used; passed is the verdict against
    the criterion encoded by ``model``.
    """

    model: str
    params: dict = field(default_factory=dict)
    residual_norm: float = float("nan")
    window: tuple = (float("nan"), float("nan"))
    passed: bool = False
    note: str = ""

    def to_json(self) -> str:
        obj = {
            "model": self.model,
            "params": {k: float(v) for k, v in self.params.items()},
            "residual_norm": float(self.residual_norm),
            "window": [float(self.window[0]), float(self.window[1])],
            "passed": bool(self.passed),
            "note": self.note,
        }
        return json.dumps(obj, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DecayFit":
        obj = json.loads(text)
        return cls(
            model=obj["model"],
            params=obj["params"],
            residual_norm=obj["residual_norm"],
            window=tuple(obj["window"]),
            passed=obj["passed"],
            note=obj.get("note", ""),
        )


def linear_fit(x, y):
    """LSQ line y = slope*x + intercept; returns (slope, intercept, r2, rms)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3:
        raise WindowError(f"need at least 3 samples for a line fit, got {x.size}")
    A = np.column_stack([x, np.ones_like(x)])
    coef, _, _, _ = np.linalg.lstsq(A, y, rcond=None)
    slope, intercept = float(coef[0]), float(coef[1])
    resid = y - (slope * x + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    return slope, intercept, r2, float(np.sqrt(ss_res / x.size))


def loglog_fit(t, values, floor: float = 0.0):
    """Fit log(values) ~ slope*log(t) + b, ignoring entries at or below floor."""
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=float)
    keep = v > floor
    if np.count_nonzero(keep) < 3:
        raise WindowError("fewer than 3 samples above floor for a log-log fit")
    return linear_fit(np.log(t[keep]), np.log(v[keep]))
