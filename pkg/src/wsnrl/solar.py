"""Baseline solar energy series and the spatially correlated harvesting field."""
from __future__ import annotations

import csv
import functools
import logging
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

RAW_STEP_HOURS = 0.5


class SolarDataError(ValueError):
    pass


@dataclass(frozen=True)
class SolarProfile:
    timestamps: list[datetime]
    baseline_energy: np.ndarray     # mWh per step
    delta_t: float                  # h
    source: str = "synthetic"       # "csv_file" | "synthetic"

    def __post_init__(self):
        if len(self.timestamps) != len(self.baseline_energy):
            raise SolarDataError("timestamps and energies differ in length")
        if (np.asarray(self.baseline_energy) < 0).any():
            raise SolarDataError("baseline energy must be non-negative")

    def __len__(self) -> int:
        return len(self.baseline_energy)

    def window(self, start: int, steps: int) -> "SolarProfile":
        if start < 0 or start + steps > len(self):
            raise IndexError(f"window [{start}, {start + steps}) outside profile of length {len(self)}")
        return SolarProfile(self.timestamps[start:start + steps],
                            self.baseline_energy[start:start + steps], self.delta_t, self.source)


def resample(timestamps: list[datetime], energy, delta_t: float, source: str) -> SolarProfile:
    """Sum raw samples into ``delta_t``-hour bins anchored at the first timestamp.

    Bins that receive no sample are filled with 0 and reported.
    """
    energy = np.asarray(energy, dtype=float)
    t0 = timestamps[0]
    width = timedelta(hours=delta_t)
    idx = np.array([int((t - t0) / width) for t in timestamps])
    n_bins = int(idx[-1]) + 1
    out = np.zeros(n_bins)
    np.add.at(out, idx, energy)
    empty = np.setdiff1d(np.arange(n_bins), idx)
    if len(empty):
        log.warning("solar series has %d empty %.3g h bins; filled with 0", len(empty), delta_t)
    stamps = [t0 + k * width for k in range(n_bins)]
    return SolarProfile(stamps, out, delta_t, source)


def load_solar_csv(path: str | Path, delta_t: float = 3.0) -> SolarProfile:
    """Read a ``timestamp,energy_mwh`` CSV (ISO-8601 stamps) and bin it to ``delta_t`` hours."""
    stamps, values = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SolarDataError(f"{path}: empty file")
        if [h.strip() for h in header] != ["timestamp", "energy_mwh"]:
            raise SolarDataError(f"{path}:1: expected header 'timestamp,energy_mwh', got {header}")
        for lineno, row in enumerate(reader, 2):
            if not row or not "".join(row).strip():
                continue
            try:
                ts, val = row
                stamp = datetime.fromisoformat(ts.strip())
                val = float(val)
            except ValueError as exc:
                raise SolarDataError(f"{path}:{lineno}: malformed row {row!r} ({exc})") from None
            if val < 0:
                raise SolarDataError(f"{path}:{lineno}: negative energy {val}")
            if stamps and stamp <= stamps[-1]:
                raise SolarDataError(f"{path}:{lineno}: timestamps not strictly increasing")
            stamps.append(stamp)
            values.append(val)
    if not stamps:
        raise SolarDataError(f"{path}: no data rows")
    return resample(stamps, values, delta_t, "csv_file")


def write_solar_csv(profile: SolarProfile, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["timestamp", "energy_mwh"])
        for t, e in zip(profile.timestamps, profile.baseline_energy):
            w.writerow([t.isoformat(), repr(float(e))])


def _half_sine_energy(a, b, sunrise, day_len, peak_mw):
    """Exact integral (mWh) of peak*sin(pi*(t - sunrise)/day_len) over [a, b] hours, daylight only."""
    lo = np.clip(a, sunrise, sunrise + day_len)
    hi = np.clip(b, sunrise, sunrise + day_len)
    w = np.pi / day_len
    return peak_mw / w * (np.cos(w * (lo - sunrise)) - np.cos(w * (hi - sunrise)))


def synth_solar(days: int, panel_watts: float = 3.0, latitude_factor: float = 1.0,
                cloud_seed: int | np.random.Generator = 0, delta_t: float = 3.0,
                start: datetime = datetime(2013, 1, 1), clear: bool = False,
                raw: bool = False) -> SolarProfile:
    """Synthetic stand-in for a panel energy series.

    Half-sine daylight power with seasonal day length and peak, times a daily
    lognormal cloud factor and a smaller per-interval one (both capped at 1, so
    the panel rating is never exceeded). Generated on a 30-minute grid and
    summed to ``delta_t`` unless ``raw``. ``latitude_factor`` scales the seasonal
    swing (0 gives equinox conditions all year).
    """
    if days < 1:
        raise ValueError("days must be >= 1")
    rng = cloud_seed if isinstance(cloud_seed, np.random.Generator) else np.random.default_rng(cloud_seed)
    per_day = int(round(24 / RAW_STEP_HOURS))
    a = np.arange(per_day) * RAW_STEP_HOURS
    b = a + RAW_STEP_HOURS
    out = np.empty(days * per_day)
    daily_cloud = rng.normal(-0.25, 0.45, size=days)
    slot_cloud = rng.normal(0.0, 0.15, size=(days, per_day))
    for d in range(days):
        doy = (start + timedelta(days=d)).timetuple().tm_yday
        season = np.sin(2 * np.pi * (doy - 80) / 365.25)
        day_len = 12.0 + 2.4 * latitude_factor * season
        peak = panel_watts * 1000.0 * (0.8 + 0.2 * latitude_factor * season)
        e = _half_sine_energy(a, b, 12.0 - day_len / 2, day_len, peak)
        if not clear:
            e = e * np.minimum(1.0, np.exp(daily_cloud[d] + slot_cloud[d]))
        out[d * per_day:(d + 1) * per_day] = e
    out = np.maximum(out, 0.0)
    stamps = [start + timedelta(hours=RAW_STEP_HOURS * k) for k in range(len(out))]
    if raw:
        return SolarProfile(stamps, out, RAW_STEP_HOURS, "synthetic")
    return resample(stamps, out, delta_t, "synthetic")


@dataclass(frozen=True)
class RandomFieldSample:
    values: np.ndarray      # (rows, cols)
    sigma: float
    l0: float


@functools.lru_cache(maxsize=16)
def _field_factor(rows: int, cols: int, l0: float) -> np.ndarray:
    """Cholesky factor of the unit-variance exponential correlation on the grid (cell units)."""
    rr, cc = np.meshgrid(np.arange(rows), np.arange(cols), indexing="ij")
    pts = np.stack([rr.ravel(), cc.ravel()], axis=1).astype(float)
    d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    corr = np.exp(-d / l0)
    corr[np.diag_indices_from(corr)] += 1e-10
    try:
        factor = np.linalg.cholesky(corr)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"field covariance not positive definite: {exc}") from None
    factor.setflags(write=False)
    return factor


def exponential_covariance(d, sigma: float, l0: float):
    return sigma**2 * np.exp(-np.asarray(d, dtype=float) / l0)


def sample_field(grid_shape, sigma: float, l0: float, rng: np.random.Generator,
                 size: int | None = None) -> RandomFieldSample:
    """Zero-mean Gaussian field with covariance ``sigma**2 * exp(-d / l0)``.

    ``size`` draws a stack of independent realisations (leading axis) in one call.
    """
    if sigma < 0 or l0 <= 0:
        raise ValueError("need sigma >= 0 and l0 > 0")
    rows, cols = grid_shape
    n = 1 if size is None else size
    if sigma == 0:
        vals = np.zeros((n, rows, cols))
    else:
        z = rng.standard_normal((n, rows * cols))
        vals = sigma * (z @ _field_factor(rows, cols, float(l0)).T).reshape(n, rows, cols)
    return RandomFieldSample(vals[0] if size is None else vals, sigma, l0)


def harvested_energy(profile: SolarProfile, field: RandomFieldSample, topology, t_k: int) -> np.ndarray:
    """Per-node harvested energy at step ``t_k`` (mWh), floored at 0."""
    if not 0 <= t_k < len(profile):
        raise IndexError(f"t_k={t_k} outside profile of length {len(profile)}")
    y = field.values.ravel()[topology.flat_cells()]
    return np.maximum(profile.baseline_energy[t_k] * (1.0 + y), 0.0)
