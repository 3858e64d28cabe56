"""Training/evaluation runs, evaluation metrics and cross-run reports."""
from __future__ import annotations

import csv
import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch

from .agent.ppo import PpoHyper, greedy_action, sample_action
from .agent.train import load_checkpoint, policy_logits, train
from .cases import get_case
from .config import ConfigError, NetworkConfig, from_mapping, save_config
from .env import WsnEnv, profile_for
from .rng import seeded_rng_streams

log = logging.getLogger(__name__)

REPORT_METRICS = ("mean_active_count", "std_active_count", "active_ratio", "mean_DT", "std_DT")


@dataclass
class EvalMetrics:
    per_node_active: list[int]
    mean_active_count: float
    std_active_count: float
    active_ratio: float
    mean_DT: float
    std_DT: float
    eval_steps: int

    @classmethod
    def from_counts(cls, active, dt, eval_steps: int) -> "EvalMetrics":
        """Population statistics over nodes of per-node active-step counts and degradation (%)."""
        active = np.asarray(active)
        dt = np.asarray(dt, dtype=float)
        mean = float(active.mean())
        return cls([int(a) for a in active], mean, float(active.std()), mean / eval_steps,
                   float(dt.mean()), float(dt.std()), eval_steps)

    def to_dict(self) -> dict:
        return asdict(self)


def make_policy(net=None, policy=None, greedy=False, rng=None):
    """Uniform ``policy(env, obs) -> action`` wrapper around a network or a rule."""
    if policy is not None:
        return policy

    def act(env, obs):
        logits, _ = policy_logits(net, obs[None])
        if greedy:
            return greedy_action(logits[0])
        return sample_action(logits[0], rng, env.controlled)[0]
    return act


def evaluate_policy(cfg: NetworkConfig, act, seed: int = 0, start: int | None = None,
                    steps: int | None = None, out_dir=None) -> tuple[EvalMetrics, WsnEnv]:
    """Roll one contiguous window; degradation accumulates over the whole window."""
    env = WsnEnv(cfg, seed, mode="eval", eval_start=start, horizon=steps, trace=True)
    obs = env.reset()
    eligible_log = []
    while not env.done:
        res = env.step(act(env, obs))
        eligible_log.append("".join("1" if e else "0" for e in res.info["eligible"]))
        obs = res.observation
    nodes = np.flatnonzero(env.controlled)
    metrics = EvalMetrics.from_counts(env.active_steps[nodes], env.deg[nodes], env.horizon)
    if out_dir is not None:
        write_eval_outputs(Path(out_dir), env, metrics, eligible_log)
    return metrics, env


def write_eval_outputs(out: Path, env: WsnEnv, metrics: EvalMetrics, eligible_log) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "metrics.json").write_text(json.dumps(metrics.to_dict(), indent=2, sort_keys=True) + "\n")
    with open(out / "step_log.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "C_a", "r1", "r2", "reward", "E_mu", "modes", "eligible"])
        for row, elig in zip(env.log, eligible_log):
            w.writerow([row["t"], row["C_a"], repr(row["r1"]), repr(row["r2"]), repr(row["reward"]),
                        repr(row["E_mu"]), row["modes"], elig])
    dist = env.topology.gateway_distances()
    with open(out / "node_summary.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["node", "controlled", "distance_m", "active_steps", "active_mode", "idle_mode",
                    "sleep_mode", "D_T"])
        for i in range(env.n):
            w.writerow([i, int(env.controlled[i]), repr(float(dist[i])), int(env.active_steps[i]),
                        *map(int, env.mode_counts[i]), repr(float(env.deg[i]))])
    with open(out / "timeseries.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "active_count", "E_mu_mwh", "E_mu_w"])
        for k, row in enumerate(env.log):
            e_mu = row["E_mu"]
            # baseline (pre-field) harvested power averaged over the step, in W
            w.writerow([row["t"], row["C_a"], repr(e_mu), repr(e_mu / env.cfg.delta_t / 1000.0)])


def metrics_from_outputs(out_dir) -> EvalMetrics:
    """Recompute the metrics from the emitted step log and node summary."""
    out = Path(out_dir)
    with open(out / "step_log.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    with open(out / "node_summary.csv", newline="") as fh:
        nodes = [r for r in csv.DictReader(fh) if r["controlled"] == "1"]
    idx = [int(r["node"]) for r in nodes]
    counts = np.zeros(len(idx), dtype=int)
    for r in rows:
        bits = r["eligible"]
        counts += np.array([bits[i] == "1" for i in idx])
    return EvalMetrics.from_counts(counts, [float(r["D_T"]) for r in nodes], len(rows))


def evaluate(checkpoint, start: int | None = None, steps: int | None = None, greedy: bool = False,
             seed: int = 0, out_dir=None, cfg: NetworkConfig | None = None):
    net, blob = load_checkpoint(checkpoint)
    if cfg is None:
        if not blob.get("config"):
            raise ConfigError(f"{checkpoint}: no embedded config; pass one explicitly")
        cfg = from_mapping(blob["config"])
    n_feat = 4 if cfg.degradation_in_state else 3
    if net.n_features != n_feat:
        raise ConfigError(f"checkpoint expects {net.n_features} features per node, "
                          f"environment provides {n_feat} (node_count={cfg.node_count})")
    rng = seeded_rng_streams(seed, worker=1000)["policy"]
    return evaluate_policy(cfg, make_policy(net, greedy=greedy, rng=rng), seed, start, steps, out_dir)


def desk_hyper(**overrides) -> PpoHyper:
    """Settings for single-core desk-scale runs (narrower conv stack, fewer epochs, larger step)."""
    base = dict(feature_size=8, epochs_per_update=2, learning_rate=3e-4, optimizer="adam")
    base.update(overrides)
    return PpoHyper(**base)


def check_data(cfg: NetworkConfig) -> None:
    profile = profile_for(cfg)
    need = cfg.eval_steps + cfg.steps_per_episode
    if len(profile) < need:
        raise ConfigError(f"solar data has {len(profile)} steps; need at least {need} "
                          f"(training windows plus a {cfg.eval_steps}-step evaluation window)")


def run_case(case_id: int, episodes: int, seeds, out_root, base_cfg: NetworkConfig | None = None,
             hyper: PpoHyper | None = None, greedy: bool = False) -> list[Path]:
    """Train and evaluate one case per seed; returns the run directories."""
    cfg = get_case(case_id).apply(base_cfg)
    hyper = hyper or PpoHyper()
    check_data(cfg)
    dirs = []
    for seed in seeds:
        run = Path(out_root) / f"case{case_id}_seed{seed}"
        run.mkdir(parents=True, exist_ok=True)
        save_config(cfg, run / "config.yaml")
        meta = {"case": case_id, "seed": seed, "episodes": episodes, "hyper": hyper.to_dict(),
                "config_hash": cfg.config_hash(), "greedy_eval": greedy}
        (run / "run.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
        result = train(lambda k, s=seed: WsnEnv(cfg, s, worker=k), hyper, seed, episodes=episodes,
                       out_dir=run, config=cfg.to_dict(), config_hash=cfg.config_hash())
        rng = seeded_rng_streams(seed, worker=1000)["policy"]
        evaluate_policy(cfg, make_policy(result.net, greedy=greedy, rng=rng), seed, out_dir=run / "eval")
        dirs.append(run)
    return dirs


def _fmt(v) -> str:
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def report(run_dirs, out_dir=None) -> list[dict]:
    """Table-4 style comparison across runs; writes report.csv and report.md when ``out_dir`` is given."""
    rows = []
    for d in sorted(Path(p) for p in run_dirs):
        row = {"run": d.name, "case": "", "seed": "", "status": "ok"}
        meta = d / "run.json"
        if meta.exists():
            m = json.loads(meta.read_text())
            row["case"], row["seed"] = m.get("case", ""), m.get("seed", "")
        metrics = d / "eval" / "metrics.json"
        if not metrics.exists():
            metrics = d / "metrics.json"
        if metrics.exists():
            vals = json.loads(metrics.read_text())
            row.update({k: vals[k] for k in REPORT_METRICS})
        else:
            row["status"] = "incomplete"
            row.update({k: "" for k in REPORT_METRICS})
        rows.append(row)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        cols = ["run", "case", "seed", *REPORT_METRICS, "status"]
        with open(out / "report.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(cols)
            for r in rows:
                w.writerow([_fmt(r[c]) for c in cols])
        lines = ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
        lines += ["| " + " | ".join(_fmt(r[c]) for c in cols) + " |" for r in rows]
        (out / "report.md").write_text("\n".join(lines) + "\n")
    return rows
