"""The six network-size / state-reward scenarios."""
from __future__ import annotations

from dataclasses import dataclass

from .config import ConfigError, NetworkConfig


@dataclass(frozen=True)
class CaseSpec:
    case_id: int
    node_count: int
    degradation_in_state: bool
    degradation_in_reward: bool

    def __post_init__(self):
        if self.degradation_in_state != self.degradation_in_reward:
            raise ConfigError("degradation appears in both state and reward or in neither")

    def apply(self, cfg: NetworkConfig | None = None) -> NetworkConfig:
        return (cfg or NetworkConfig()).replace(
            node_count=self.node_count,
            degradation_in_state=self.degradation_in_state,
            degradation_in_reward=self.degradation_in_reward,
        )


CASES = {
    1: CaseSpec(1, 16, True, True),
    2: CaseSpec(2, 16, False, False),
    3: CaseSpec(3, 56, True, True),
    4: CaseSpec(4, 56, False, False),
    5: CaseSpec(5, 112, True, True),
    6: CaseSpec(6, 112, False, False),
}


def get_case(case_id: int) -> CaseSpec:
    try:
        return CASES[case_id]
    except KeyError:
        raise ConfigError(f"unknown case {case_id}; choose from {sorted(CASES)}") from None
