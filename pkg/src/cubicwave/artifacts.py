"""Run artifacts: everything a run leaves on disk, and how it round-trips.

Layout of an artifact directory:

    config.txt          full key=value snapshot (re-runnable)
    meta.json           status, timings, classification, blow-up time
    energy.csv          t, energy_sq
    rays/ray_<k>.csv    per-ray samples (index in meta.json)
    fits/<name>.json    one DecayFit per analysis
    snapshots/<k>.bin   raw complex128 field dumps + .json sidecars
    series/...          plot-ready exports from emit_series

CSV and JSON floats are written with repr(), the shortest round-trip
form, so identical artifacts are byte-identical files.
"""

from __future__ import annotations

import json
import sys
import time
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from .asymptotics import EnergyTrace, RaySample
from .config import ExperimentConfig, parse_config, render_config
from .errors import ConfigError
from .fitting import DecayFit

__all__ = ["RunArtifact", "save_array", "load_array", "emit_series"]

STATUS_VALUES = ("COMPLETED", "BLOWUP", "ERROR")


def save_array(path, array, meta=None):
    """Flat little-endian binary dump plus a JSON sidecar describing it."""
    path = Path(path)
    arr = np.ascontiguousarray(array)
    if arr.dtype == np.complex128:
        dtype = "complex128"
    elif arr.dtype == np.float64:
        dtype = "float64"
    else:
        arr = arr.astype(np.complex128)
        dtype = "complex128"
    if sys.byteorder != "little":  # pragma: no cover - x86/arm are little-endian
        arr = arr.byteswap()
    path.write_bytes(arr.tobytes())
    sidecar = {
        "dims": list(arr.shape),
        "dtype": dtype,
        "endianness": "little",
    }
    if meta:
        sidecar.update(meta)
    path.with_suffix(path.suffix + ".json").write_text(
        json.dumps(sidecar, indent=1, sort_keys=True) + "\n"
    )
    return sidecar


def load_array(path):
    path = Path(path)
    sidecar = json.loads(path.with_suffix(path.suffix + ".json").read_text())
    raw = np.frombuffer(path.read_bytes(), dtype=sidecar["dtype"])
    if sys.byteorder != "little":  # pragma: no cover
        raw = raw.byteswap()
    return raw.reshape(sidecar["dims"]).copy(), sidecar


@dataclass
class RunArtifact:
    """One run's complete record; reproducible from config + seed."""

    config: ExperimentConfig
    eps: float
    status: str = "COMPLETED"
    meta: dict = dc_field(default_factory=dict)
    rays: list = dc_field(default_factory=list)
    energy: EnergyTrace | None = None
    fits: dict = dc_field(default_factory=dict)
    snapshots: list = dc_field(default_factory=list)  # (t, field array) pairs

    def __post_init__(self):
        if self.status not in STATUS_VALUES:
            raise ConfigError(f"status must be one of {STATUS_VALUES}")

    @property
    def passed(self) -> bool:
        """Aggregate verdict: expected terminal status and every fit green."""
        expected = "BLOWUP" if self.config.expect == "blowup" else "COMPLETED"
        if self.status != expected:
            return False
        return all(fit.passed for fit in self.fits.values())

    # -- persistence --------------------------------------------------------

    def save(self, out_dir) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.txt").write_text(render_config(self.config))
        ray_index = []
        if self.rays:
            (out / "rays").mkdir(exist_ok=True)
            for k, ray in enumerate(self.rays):
                name = f"ray_{k}.csv"
                (out / "rays" / name).write_text(ray.to_csv())
                ray_index.append({"sigma": ray.sigma, "omega": ray.omega, "file": name})
        if self.energy is not None:
            (out / "energy.csv").write_text(self.energy.to_csv())
        if self.fits:
            (out / "fits").mkdir(exist_ok=True)
            for name, fit in sorted(self.fits.items()):
                (out / "fits" / f"{name}.json").write_text(fit.to_json() + "\n")
        if self.snapshots:
            (out / "snapshots").mkdir(exist_ok=True)
            for k, (t, arr) in enumerate(self.snapshots):
                save_array(
                    out / "snapshots" / f"snap_{k}.bin",
                    arr,
                    meta={"t": float(t), "dt": self.meta.get("dt"), "dx": self.meta.get("dx")},
                )
        meta = dict(self.meta)
        meta.update(
            {
                "status": self.status,
                "eps": float(self.eps),
                "rays": ray_index,
                "written_at": meta.get("written_at", time.strftime("%Y-%m-%dT%H:%M:%S")),
            }
        )
        (out / "meta.json").write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")
        return out

    @classmethod
    def load(cls, run_dir) -> "RunArtifact":
        run_dir = Path(run_dir)
        if not (run_dir / "meta.json").exists():
            raise ConfigError(f"{run_dir} is not a run artifact (no meta.json)")
        meta = json.loads((run_dir / "meta.json").read_text())
        config = parse_config((run_dir / "config.txt").read_text())
        rays = []
        for entry in meta.get("rays", []):
            text = (run_dir / "rays" / entry["file"]).read_text()
            rays.append(RaySample.from_csv(text, sigma=entry["sigma"], omega=entry["omega"]))
        energy = None
        if (run_dir / "energy.csv").exists():
            rows = (run_dir / "energy.csv").read_text().strip().splitlines()[1:]
            t, e = [], []
            for row in rows:
                a, b = row.split(",")
                t.append(float(a))
                e.append(float(b))
            energy = EnergyTrace(times=np.array(t), energy_sq=np.array(e))
        fits = {}
        fits_dir = run_dir / "fits"
        if fits_dir.is_dir():
            for f in sorted(fits_dir.glob("*.json")):
                fits[f.stem] = DecayFit.from_json(f.read_text())
        snapshots = []
        snap_dir = run_dir / "snapshots"
        if snap_dir.is_dir():
            for f in sorted(snap_dir.glob("snap_*.bin")):
                arr, sidecar = load_array(f)
                snapshots.append((float(sidecar["t"]), arr))
        status = meta.pop("status", "COMPLETED")
        eps = float(meta.pop("eps", config.eps[0]))
        meta.pop("rays", None)
        return cls(
            config=config,
            eps=eps,
            status=status,
            meta=meta,
            rays=rays,
            energy=energy,
            fits=fits,
            snapshots=snapshots,
        )


def emit_series(artifact: RunArtifact, which: str, out_dir) -> list:
    """Write plot-ready CSVs; returns the paths written.

    which: "energy", "rays", "fits", or "all".  Output is byte-stable
    for identical artifacts (repr floats, sorted iteration).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if which in ("energy", "all") and artifact.energy is not None:
        p = out / "energy.csv"
        p.write_text(artifact.energy.to_csv())
        written.append(p)
    if which in ("rays", "all"):
        for k, ray in enumerate(artifact.rays):
            lines = ["t,re_U,im_U,abs_U,arg_U_unwrapped"]
            if ray.times.size:
                raw = np.angle(ray.U_values)
                wrapped = np.angle(np.exp(1j * np.diff(raw)))
                phase = raw[0] + np.concatenate(([0.0], np.cumsum(wrapped)))
                for i, t in enumerate(ray.times):
                    u = ray.U_values[i]
                    lines.append(
                        f"{float(t)!r},{u.real!r},{u.imag!r},{abs(u)!r},{float(phase[i])!r}"
                    )
            p = out / f"ray_series_{k}.csv"
            p.write_text("\n".join(lines) + "\n")
            written.append(p)
    if which in ("fits", "all"):
        for name, fit in sorted(artifact.fits.items()):
            p = out / f"fit_{name}.json"
            p.write_text(fit.to_json() + "\n")
            written.append(p)
    if not written and which not in ("energy", "rays", "fits", "all"):
        raise ConfigError(f"unknown series {which!r}; use energy, rays, fits, or all")
    return written
