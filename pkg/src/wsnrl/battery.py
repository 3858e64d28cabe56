"""Mode-dependent consumption and the clamped battery balance update."""
from __future__ import annotations

from enum import IntEnum
from typing import NamedTuple

import numpy as np


class Mode(IntEnum):
    ACTIVE = 0
    IDLE = 1
    SLEEP = 2


def mode_powers(config) -> np.ndarray:
    """Power draw (mW) indexed by mode."""
    return np.array([config.power_active, config.power_idle, config.power_sleep])


def consumption(mode, config):
    """Energy used over one step (mWh). Works on scalars or integer mode arrays."""
    p = mode_powers(config)[np.asarray(mode, dtype=int)]
    out = p * config.delta_t
    return float(out) if np.ndim(out) == 0 else out


class BatteryStep(NamedTuple):
    battery: np.ndarray | float
    delta: np.ndarray | float
    forced_sleep: np.ndarray | bool


def battery_step(battery, harvested, consumed, config) -> BatteryStep:
    """``B + E_h - E_c`` clamped to ``[0, B_max]``.

    ``forced_sleep`` flags nodes whose unclamped balance fell below
    ``min_reserve``; the caller holds them in Sleep on the next step.
    """
    battery = np.asarray(battery, dtype=float)
    if (np.asarray(harvested) < 0).any():
        raise ValueError("harvested energy must be non-negative")
    raw = battery + harvested - consumed
    new = np.clip(raw, 0.0, config.battery_capacity)
    forced = raw < config.min_reserve
    if new.ndim == 0:
        return BatteryStep(float(new), float(new - battery), bool(forced))
    return BatteryStep(new, new - battery, forced)
