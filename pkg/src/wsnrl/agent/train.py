"""Rollout collection, the training loop, checkpoints and learning curves."""
from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

import numpy as np
import torch

from ..rng import derive_seed, seeded_rng_streams
from .network import PolicyNet, feature_size_for
from .ppo import PpoHyper, RolloutBuffer, greedy_action, make_optimizer, sample_action, update

log = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "wsnrl-checkpoint"
CHECKPOINT_VERSION = 1
CURVE_FIELDS = ("update", "episodes", "mean_return", "r1_sum", "r2_sum", "policy_loss",
                "vf_loss", "entropy", "approx_kl", "clip_frac")


def build_net(node_count: int, n_features: int, hyper: PpoHyper, seed: int,
              dtype=torch.float32) -> PolicyNet:
    torch.manual_seed(seed)
    fs = hyper.feature_size or feature_size_for(node_count)
    return PolicyNet(n_features, fs, hyper.n_conv).to(dtype)


def policy_logits(net: PolicyNet, obs_batch: np.ndarray) -> np.ndarray:
    dtype = next(net.parameters()).dtype
    with torch.no_grad():
        logits, values = net(torch.as_tensor(obs_batch, dtype=dtype))
    return logits.double().numpy(), values.double().numpy()


def collect(envs, net: PolicyNet, rng: np.random.Generator, buffer: RolloutBuffer | None,
            hyper: PpoHyper) -> list[dict]:
    """Run one full episode on each env in lockstep with batched policy calls."""
    obs = [env.reset() for env in envs]
    traj = [{"obs": [], "actions": [], "logp": [], "rewards": [], "values": [], "r1": 0.0, "r2": 0.0}
            for _ in envs]
    live = list(range(len(envs)))
    while live:
        logits, values = policy_logits(net, np.stack([obs[i] for i in live]))
        for j, i in enumerate(live):
            a, lp = sample_action(logits[j], rng, envs[i].controlled)
            res = envs[i].step(a)
            tr = traj[i]
            tr["obs"].append(obs[i])
            tr["actions"].append(a)
            tr["logp"].append(lp)
            tr["rewards"].append(res.reward)
            tr["values"].append(values[j])
            tr["r1"] += res.info.get("r1", 0.0)
            tr["r2"] += res.info.get("r2", 0.0)
            obs[i] = res.observation
        live = [i for i in live if not envs[i].done]
    if buffer is not None:
        for tr in traj:
            buffer.add_trajectory(tr["obs"], tr["actions"], tr["logp"], tr["rewards"], tr["values"], hyper)
    return [{"return": float(np.sum(tr["rewards"])), "r1_sum": tr["r1"], "r2_sum": tr["r2"]} for tr in traj]


@dataclass
class TrainResult:
    net: PolicyNet
    curve: list[dict] = field(default_factory=list)
    checkpoints: list[Path] = field(default_factory=list)


def save_checkpoint(path, net: PolicyNet, hyper: PpoHyper, config: dict | None = None,
                    config_hash: str | None = None, rng_states: dict | None = None, **meta) -> Path:
    path = Path(path)
    state = {k: v.detach().clone() for k, v in net.state_dict().items()}
    torch.save({
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "state_dict": state,
        "shapes": {k: list(v.shape) for k, v in state.items()},
        "net": {"n_features": net.n_features, "feature_size": net.feature_size,
                "n_conv": sum(isinstance(m, torch.nn.Conv2d) for m in net.conv)},
        "hyper": hyper.to_dict(),
        "config": config,
        "config_hash": config_hash,
        "rng_states": rng_states or {},
        "meta": meta,
    }, path)
    return path


def load_checkpoint(path) -> tuple[PolicyNet, dict]:
    blob = torch.load(path, map_location="cpu", weights_only=False)
    if blob.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"{path}: not a {CHECKPOINT_FORMAT} file")
    if blob["version"] > CHECKPOINT_VERSION:
        raise ValueError(f"{path}: checkpoint version {blob['version']} is newer than supported")
    spec = blob["net"]
    net = PolicyNet(spec["n_features"], spec["feature_size"], spec["n_conv"])
    dtype = next(iter(blob["state_dict"].values())).dtype
    net = net.to(dtype)
    net.load_state_dict(blob["state_dict"])
    return net, blob


def write_curve(curve: Iterable[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CURVE_FIELDS, extrasaction="ignore")
        w.writeheader()
        for row in curve:
            w.writerow({k: (repr(row[k]) if isinstance(row[k], float) else row[k]) for k in CURVE_FIELDS})


def train(env_factory: Callable[[int], object], hyper: PpoHyper, seed: int = 0, *,
          episodes: int | None = None, out_dir=None, checkpoint_every: int = 50,
          callbacks: Iterable[Callable[[dict], None]] = (), config: dict | None = None,
          config_hash: str | None = None, single_threaded: bool = True,
          dtype=torch.float32) -> TrainResult:
    """Alternate rollouts (``n_actors`` episodes) and PPO updates.

    ``env_factory(worker)`` builds one environment per actor. The learning
    curve gets one row per update.
    """
    if single_threaded:
        torch.set_num_threads(1)
    episodes = hyper.episodes_total if episodes is None else episodes
    envs = [env_factory(k) for k in range(hyper.n_actors)]
    probe = envs[0]
    streams = seeded_rng_streams(seed)
    rng = streams["policy"]
    net = build_net(probe.n, probe.n_features, hyper, derive_seed(rng), dtype)
    opt = make_optimizer(net, hyper)
    buffer = RolloutBuffer()
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        (out / "checkpoints").mkdir(parents=True, exist_ok=True)
    result = TrainResult(net)
    n_updates = episodes // hyper.n_actors

    def ckpt(name, k):
        if out is None:
            return None
        p = save_checkpoint(out / "checkpoints" / name, net, hyper, config, config_hash,
                            {"policy": rng.bit_generator.state}, update=k, episodes=k * hyper.n_actors)
        result.checkpoints.append(p)
        return p

    t0 = time.time()
    for k in range(1, n_updates + 1):
        stats = collect(envs, net, rng, buffer, hyper)
        try:
            metrics = update(net, opt, buffer, hyper, probe.controlled, rng)
        except Exception:
            ckpt("failed.pt", k)
            raise
        row = {"update": k, "episodes": k * hyper.n_actors,
               "mean_return": float(np.mean([s["return"] for s in stats])),
               "r1_sum": float(np.mean([s["r1_sum"] for s in stats])),
               "r2_sum": float(np.mean([s["r2_sum"] for s in stats])), **metrics}
        result.curve.append(row)
        for cb in callbacks:
            cb(row)
        if k % 10 == 0:
            log.info("update %d/%d return %.4f (%.1fs)", k, n_updates, row["mean_return"], time.time() - t0)
        if checkpoint_every and k % checkpoint_every == 0:
            ckpt(f"update_{k:05d}.pt", k)
    if out is not None:
        ckpt("final.pt", n_updates)
        write_curve(result.curve, out / "learning_curve.csv")
    return result


def run_policy(env, net: PolicyNet | None = None, rng: np.random.Generator | None = None,
               greedy: bool = False, policy=None):
    """Roll ``env`` to the end with a network or a rule policy; returns per-step rewards."""
    obs = env.reset()
    rewards = []
    while not env.done:
        if policy is not None:
            a = policy(env, obs)
        else:
            logits, _ = policy_logits(net, obs[None])
            a = greedy_action(logits[0]) if greedy else sample_action(logits[0], rng, env.controlled)[0]
        res = env.step(a)
        rewards.append(res.reward)
        obs = res.observation
    return rewards
