"""PPO pieces: action sampling, GAE, clipped loss, rollout buffer and the update."""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

import numpy as np
import torch
import torch.nn.functional as F

from .network import PolicyNet

log = logging.getLogger(__name__)


@dataclass
class PpoHyper:
    clip_eps: float = 0.2
    vf_clip: float = 0.5
    gae_lambda: float = 0.95
    gamma: float = 1.0
    learning_rate: float = 3e-5
    c1: float = 0.5
    c2: float = 0.0
    epochs_per_update: int = 10
    minibatch_size: int = 240
    n_actors: int = 4
    episodes_total: int = 20000
    adv_norm: bool = True
    optimizer: str = "sgd"             # "sgd" or "adam"
    feature_size: int | None = None    # None: smallest power of two > node_count
    n_conv: int = 8

    def __post_init__(self):
        if not 0 < self.clip_eps < 1:
            raise ValueError("clip_eps must lie in (0, 1)")
        if not 0 <= self.gae_lambda <= 1:
            raise ValueError("gae_lambda must lie in [0, 1]")
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must lie in (0, 1]")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")

    def to_dict(self) -> dict:
        return asdict(self)


class NonFiniteLoss(FloatingPointError):
    pass


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def sample_action(logits, rng: np.random.Generator, mask=None) -> tuple[np.ndarray, float]:
    """Independent categorical draw per node; returns actions and the joint log-prob.

    ``mask`` (bool per node) drops uncontrolled nodes from the joint log-prob.
    """
    logits = np.asarray(logits, dtype=np.float64)
    p = softmax(logits)
    u = rng.random(len(p))
    cdf = np.cumsum(p, axis=-1)
    actions = np.minimum((u[:, None] >= cdf).sum(axis=-1), p.shape[-1] - 1)
    logp = np.log(p[np.arange(len(p)), actions])
    if mask is not None:
        logp = logp[np.asarray(mask, dtype=bool)]
    return actions, float(logp.sum())


def greedy_action(logits) -> np.ndarray:
    return np.asarray(logits).argmax(axis=-1)


def gae(rewards, values, bootstrap_value: float = 0.0, gamma: float = 1.0, lam: float = 0.95):
    """Generalized advantage estimates and return targets for one trajectory."""
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if rewards.shape != values.shape:
        raise ValueError("rewards and values differ in length")
    adv = np.zeros_like(rewards)
    next_value, running = bootstrap_value, 0.0
    for t in range(len(rewards) - 1, -1, -1):
        delta = rewards[t] + gamma * next_value - values[t]
        running = delta + gamma * lam * running
        adv[t] = running
        next_value = values[t]
    return adv, adv + values


def clipped_surrogate(ratio, adv, eps: float):
    """Per-sample ``min(r * A, clip(r, 1 - eps, 1 + eps) * A)``."""
    if isinstance(ratio, torch.Tensor):
        return torch.min(ratio * adv, torch.clamp(ratio, 1 - eps, 1 + eps) * adv)
    ratio = np.asarray(ratio, dtype=float)
    return np.minimum(ratio * adv, np.clip(ratio, 1 - eps, 1 + eps) * adv)


def evaluate_actions(net: PolicyNet, obs, actions, mask):
    logits, values = net(obs)
    logp_all = F.log_softmax(logits, dim=-1)
    logp_nodes = logp_all.gather(-1, actions.unsqueeze(-1)).squeeze(-1)
    ent_nodes = -(logp_all.exp() * logp_all).sum(-1)
    m = mask.to(logp_nodes.dtype)
    return (logp_nodes * m).sum(-1), (ent_nodes * m).sum(-1), values


def ppo_loss(net: PolicyNet, mb: dict, hyper: PpoHyper):
    """Scalar loss ``-L_clip + c1 * L_vf - c2 * S`` plus diagnostics.

    ``mb`` holds tensors obs, actions, mask, old_logp, adv, returns, old_values.
    """
    logp, entropy, values = evaluate_actions(net, mb["obs"], mb["actions"], mb["mask"])
    ratio = torch.exp(logp - mb["old_logp"])
    surr = clipped_surrogate(ratio, mb["adv"], hyper.clip_eps)
    v_clipped = mb["old_values"] + torch.clamp(values - mb["old_values"], -hyper.vf_clip, hyper.vf_clip)
    vf = torch.max((values - mb["returns"]) ** 2, (v_clipped - mb["returns"]) ** 2)
    loss = -surr.mean() + hyper.c1 * vf.mean() - hyper.c2 * entropy.mean()
    with torch.no_grad():
        log_ratio = logp - mb["old_logp"]
        diag = {
            "policy_loss": float(-surr.mean()),
            "vf_loss": float(vf.mean()),
            "entropy": float(entropy.mean()),
            "approx_kl": float(((ratio - 1) - log_ratio).mean()),
            "clip_frac": float(((ratio - 1).abs() > hyper.clip_eps).float().mean()),
            "ratio": ratio.detach(),
        }
    if not torch.isfinite(loss):
        raise NonFiniteLoss(f"non-finite PPO loss {loss.item()} (diagnostics: "
                            f"{ {k: v for k, v in diag.items() if k != 'ratio'} })")
    return loss, diag


@dataclass
class RolloutBuffer:
    """Transitions from complete episodes; advantages are filled per finished trajectory."""
    obs: list = field(default_factory=list)
    actions: list = field(default_factory=list)
    logp: list = field(default_factory=list)
    rewards: list = field(default_factory=list)
    values: list = field(default_factory=list)
    advantages: list = field(default_factory=list)
    returns: list = field(default_factory=list)

    def add_trajectory(self, obs, actions, logp, rewards, values, hyper: PpoHyper,
                       bootstrap_value: float = 0.0) -> None:
        adv, ret = gae(rewards, values, bootstrap_value, hyper.gamma, hyper.gae_lambda)
        self.obs.extend(obs)
        self.actions.extend(actions)
        self.logp.extend(logp)
        self.rewards.extend(rewards)
        self.values.extend(values)
        self.advantages.extend(adv)
        self.returns.extend(ret)

    def __len__(self) -> int:
        return len(self.obs)

    def clear(self) -> None:
        for v in self.__dict__.values():
            v.clear()

    def tensors(self, dtype=torch.float32) -> dict:
        return {
            "obs": torch.as_tensor(np.stack(self.obs), dtype=dtype),
            "actions": torch.as_tensor(np.stack(self.actions), dtype=torch.long),
            "old_logp": torch.as_tensor(np.array(self.logp), dtype=dtype),
            "adv": torch.as_tensor(np.array(self.advantages), dtype=dtype),
            "returns": torch.as_tensor(np.array(self.returns), dtype=dtype),
            "old_values": torch.as_tensor(np.array(self.values), dtype=dtype),
        }


def make_optimizer(net: PolicyNet, hyper: PpoHyper) -> torch.optim.Optimizer:
    if hyper.optimizer == "sgd":
        return torch.optim.SGD(net.parameters(), lr=hyper.learning_rate)
    return torch.optim.Adam(net.parameters(), lr=hyper.learning_rate, eps=1e-5)


def update(net: PolicyNet, optimizer, buffer: RolloutBuffer, hyper: PpoHyper, mask,
           rng: np.random.Generator) -> dict:
    """Several epochs of shuffled minibatch steps on the buffer, which is then cleared.

    Old log-probs are recomputed under the pre-update parameters with the
    first epoch's minibatch partition, so the ratio is exactly 1 on the first
    minibatch.
    """
    dtype = next(net.parameters()).dtype
    data = buffer.tensors(dtype)
    n = len(buffer)
    if hyper.adv_norm and n > 1:
        a = data["adv"]
        data["adv"] = (a - a.mean()) / (a.std() + 1e-8)
    data["mask"] = torch.as_tensor(np.asarray(mask, dtype=bool))
    mb_size = min(hyper.minibatch_size, n)
    orders = [rng.permutation(n) for _ in range(hyper.epochs_per_update)]

    with torch.no_grad():
        for start in range(0, n, mb_size):
            idx = torch.as_tensor(orders[0][start:start + mb_size])
            logp, _, _ = evaluate_actions(net, data["obs"][idx], data["actions"][idx], data["mask"])
            data["old_logp"][idx] = logp

    sums: dict[str, float] = {}
    count = skipped = 0
    first_ratio = None
    for order in orders:
        for start in range(0, n, mb_size):
            idx = torch.as_tensor(order[start:start + mb_size])
            mb = {k: (v if k == "mask" else v[idx]) for k, v in data.items()}
            loss, diag = ppo_loss(net, mb, hyper)
            if first_ratio is None:
                first_ratio = diag["ratio"]
            optimizer.zero_grad()
            loss.backward()
            grads_ok = all(p.grad is None or torch.isfinite(p.grad).all() for p in net.parameters())
            if not grads_ok:
                log.warning("non-finite gradient; skipping minibatch step")
                skipped += 1
                continue
            optimizer.step()
            for k, v in diag.items():
                if k != "ratio":
                    sums[k] = sums.get(k, 0.0) + v
            count += 1
    buffer.clear()
    metrics = {k: v / max(count, 1) for k, v in sums.items()}
    metrics["skipped_steps"] = skipped
    metrics["first_ratio_max_dev"] = float((first_ratio - 1).abs().max()) if first_ratio is not None else 0.0
    return metrics
