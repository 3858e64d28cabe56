"""Node-shared CNN actor-critic.

Every node's state row is treated as a one-channel ``F x 1`` image; the nodes
sit on the batch axis so all weights are shared across nodes. Eight 3x3 convs
with zero padding 2 grow the map by 2 per side per layer (4x1 -> 20x17).
"""
from __future__ import annotations

import math

import torch
from torch import nn

N_MODES = 3
N_CONV = 8


def feature_size_for(node_count: int) -> int:
    """Smallest power of two strictly above ``node_count`` (16 -> 32, 56 -> 64, 112 -> 128)."""
    return 1 << int(node_count).bit_length()


def conv_output_shape(h: int, w: int, layers: int = N_CONV) -> tuple[int, int]:
    return h + 2 * layers, w + 2 * layers


def _sorted_mean(x: torch.Tensor, dim: int) -> torch.Tensor:
    # summing in sorted order makes the pooled value independent of node order
    return x.sort(dim=dim).values.mean(dim=dim)


class PolicyNet(nn.Module):
    def __init__(self, n_features: int = 4, feature_size: int = 32, n_conv: int = N_CONV,
                 action_gain: float = 0.01):
        super().__init__()
        self.n_features = n_features
        self.feature_size = feature_size
        layers = []
        c = 1
        for _ in range(n_conv):
            layers += [nn.Conv2d(c, feature_size, 3, stride=1, padding=2), nn.LeakyReLU()]
            c = feature_size
        self.conv = nn.Sequential(*layers)
        self.trunk = nn.Linear(feature_size, feature_size)
        self.action_net = nn.Sequential(
            nn.Linear(feature_size, feature_size), nn.Tanh(),
            nn.Linear(feature_size, feature_size), nn.Tanh(),
        )
        self.action_out = nn.Linear(feature_size, N_MODES)
        self.value_net = nn.Sequential(
            nn.Linear(feature_size, feature_size), nn.Tanh(),
            nn.Linear(feature_size, feature_size), nn.Tanh(),
        )
        self.value_out = nn.Linear(feature_size, 1)
        self._init(action_gain)
        # NHWC conv kernels are markedly faster on CPU for these thin, small images
        self.conv.to(memory_format=torch.channels_last)

    def _init(self, action_gain: float) -> None:
        for m in self.modules():
            if isinstance(m, (nn.Conv2d, nn.Linear)):
                nn.init.orthogonal_(m.weight, math.sqrt(2))
                nn.init.zeros_(m.bias)
        nn.init.orthogonal_(self.action_out.weight, action_gain)
        nn.init.orthogonal_(self.value_out.weight, 1.0)

    def node_features(self, obs: torch.Tensor) -> torch.Tensor:
        """(..., N, F) -> (..., N, feature_size)."""
        lead = obs.shape[:-1]
        if obs.shape[-1] != self.n_features:
            raise ValueError(f"observation has {obs.shape[-1]} features per node, "
                             f"network expects {self.n_features}")
        x = obs.reshape(-1, 1, self.n_features, 1).contiguous(memory_format=torch.channels_last)
        x = self.conv(x).mean(dim=(2, 3))
        x = torch.tanh(self.trunk(x))
        return x.reshape(*lead, self.feature_size)

    def forward(self, obs: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        """Per-node logits ``(..., N, 3)`` and one value per observation ``(...)``."""
        feats = self.node_features(obs)
        logits = self.action_out(self.action_net(feats))
        pooled = _sorted_mean(feats, dim=-2)
        value = self.value_out(self.value_net(pooled)).squeeze(-1)
        return logits, value

    def conv_shape(self, h: int, w: int = 1) -> tuple[int, ...]:
        with torch.no_grad():
            p = next(self.parameters())
            return tuple(self.conv(torch.zeros(1, 1, h, w, dtype=p.dtype)).shape[2:])
