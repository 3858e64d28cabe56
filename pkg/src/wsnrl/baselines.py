"""Rule-based duty-cycle policies with the same ``policy(env, obs) -> action`` shape as a trained agent."""
from __future__ import annotations

import numpy as np

from .battery import Mode


def all_active(env, obs) -> np.ndarray:
    return np.full(env.n, int(Mode.ACTIVE))


class RoundRobin:
    """Rotate a fixed fraction of the controlled nodes through Active; the rest sleep."""

    def __init__(self, fraction: float = 0.5):
        if not 0 <= fraction <= 1:
            raise ValueError("fraction must lie in [0, 1]")
        self.fraction = fraction

    def __call__(self, env, obs) -> np.ndarray:
        nodes = np.flatnonzero(env.controlled)
        m = int(round(self.fraction * len(nodes)))
        a = np.full(env.n, int(Mode.SLEEP))
        if m:
            offset = (env.t * m) % len(nodes)
            a[nodes[(offset + np.arange(m)) % len(nodes)]] = int(Mode.ACTIVE)
        return a


class GreedyBattery:
    """Activate the ``k`` fullest controlled nodes whose reserve clears the active threshold."""

    def __init__(self, k: int | None = None):
        self.k = k

    def __call__(self, env, obs) -> np.ndarray:
        level = obs[:, 0] * env.cfg.battery_capacity
        nodes = np.flatnonzero(env.controlled & (level > env.cfg.active_count_threshold))
        k = len(nodes) if self.k is None else min(self.k, len(nodes))
        a = np.full(env.n, int(Mode.SLEEP))
        if k:
            order = nodes[np.argsort(-level[nodes], kind="stable")]
            a[order[:k]] = int(Mode.ACTIVE)
        return a


def baseline_policy(name: str, **kwargs):
    if name == "all_active":
        return all_active
    if name == "round_robin":
        return RoundRobin(**kwargs)
    if name == "greedy_battery":
        return GreedyBattery(**kwargs)
    raise ValueError(f"unknown baseline {name!r}")
