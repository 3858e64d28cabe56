"""Soft geometric graph model for gateway-leaf links."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LinkModel:
    r0: float = 1000.0
    beta: float = 1.0
    eta: float = 1.0

    @classmethod
    def from_config(cls, cfg) -> "LinkModel":
        return cls(cfg.r0, cfg.beta, cfg.eta)


def link_probability(model: LinkModel, distance):
    """``beta * exp(-(r / r0) ** eta)``."""
    d = np.asarray(distance, dtype=float)
    if (d < 0).any():
        raise ValueError("distance must be non-negative")
    p = model.beta * np.exp(-((d / model.r0) ** model.eta))
    return float(p) if p.ndim == 0 else p


def sample_links(model: LinkModel, topology, rng: np.random.Generator, u=None) -> np.ndarray:
    """One Bernoulli draw per node; the gateway's own entry is always True.

    ``u`` may supply the uniforms directly (one per node), which makes success
    monotone in distance for a shared draw.
    """
    p = link_probability(model, topology.gateway_distances())
    if u is None:
        u = rng.random(topology.node_count)
    ok = np.asarray(u) < p
    ok[topology.gateway_index] = True
    return ok
