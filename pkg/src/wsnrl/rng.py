"""Named, independent random streams derived from one master seed."""
from __future__ import annotations

import numpy as np

STREAMS = ("field", "comms", "solar_noise", "policy", "env")


def seeded_rng_streams(master_seed: int, worker: int = 0) -> dict[str, np.random.Generator]:
    """One ``Generator`` per stream name.

    Each stream gets its own child ``SeedSequence`` keyed by (worker, name index),
    so drawing from one stream never shifts another.
    """
    out = {}
    for i, name in enumerate(STREAMS):
        ss = np.random.SeedSequence(master_seed, spawn_key=(worker, i))
        out[name] = np.random.Generator(np.random.PCG64(ss))
    return out


def derive_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**63 - 1))
