"""Duty-cycle MDP over a solar-harvesting sensor network."""
from __future__ import annotations

import csv
import functools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .battery import Mode, battery_step, mode_powers
from .config import ConfigError, NetworkConfig
from .connectivity import LinkModel, sample_links
from .degradation import OnlineDegradation
from .rng import seeded_rng_streams
from .solar import SolarProfile, harvested_energy, load_solar_csv, sample_field, synth_solar
from .topology import Topology, topology_for

STEP_LOG_FIELDS = ("t", "C_a", "r1", "r2", "reward", "E_mu", "modes")


class EnvStateError(RuntimeError):
    pass


@functools.lru_cache(maxsize=8)
def _cached_profile(csv_path, days, panel_watts, latitude_factor, cloud_seed, delta_t):
    if csv_path:
        return load_solar_csv(csv_path, delta_t)
    return synth_solar(days, panel_watts, latitude_factor, cloud_seed, delta_t)


def profile_for(cfg: NetworkConfig) -> SolarProfile:
    return _cached_profile(cfg.solar_csv, cfg.solar_days, cfg.panel_watts,
                           cfg.latitude_factor, cfg.cloud_seed, cfg.delta_t)


def utility_reward(active_count: int, n_controlled: int, t_kmax: int) -> float:
    return active_count / (n_controlled * t_kmax)


def degradation_spread(dt) -> float:
    """Population std of degradation normalised by its maximum; 0 while nothing has degraded."""
    dt = np.asarray(dt, dtype=float)
    top = dt.max()
    if top <= 0:
        return 0.0
    return float(np.std(dt / top))


def episode_return(rewards) -> float:
    return float(np.sum(rewards))


@dataclass
class StepResult:
    observation: np.ndarray
    reward: float
    done: bool
    info: dict = field(default_factory=dict)


class WsnEnv:
    """Gym-style environment: ``reset() -> obs``, ``step(action) -> StepResult``.

    ``mode="train"`` draws a random ``steps_per_episode`` window from the part
    of the solar profile before the evaluation window; ``mode="eval"`` runs the
    contiguous window ``[eval_start, eval_start + horizon)`` (default: the last
    ``eval_steps`` of the profile).
    """

    def __init__(self, config: NetworkConfig, seed: int = 0, *, worker: int = 0,
                 mode: str = "train", profile: SolarProfile | None = None,
                 topology: Topology | None = None, eval_start: int | None = None,
                 horizon: int | None = None, trace: bool = False):
        if mode not in ("train", "eval"):
            raise ValueError(f"unknown mode {mode!r}")
        self.cfg = config
        self.mode = mode
        self.profile = profile if profile is not None else profile_for(config)
        self.topology = topology if topology is not None else topology_for(config)
        if self.topology.node_count != config.node_count:
            raise ConfigError("topology and config disagree on node_count")
        self.links = LinkModel.from_config(config)
        self.streams = seeded_rng_streams(seed, worker)
        self.trace = trace

        n = config.node_count
        self.n = n
        self.gw = self.topology.gateway_index
        self.controlled = np.ones(n, dtype=bool)
        if not config.gateway_participates:
            self.controlled[self.gw] = False
        self.n_controlled = int(self.controlled.sum())
        self.n_features = 4 if config.degradation_in_state else 3
        self._powers = mode_powers(config)

        total = len(self.profile)
        if mode == "train":
            self.horizon = horizon or config.steps_per_episode
            train_len = max(total - config.eval_steps, 0)
            self.max_start = train_len - self.horizon
            if self.max_start < 0:
                raise ConfigError(f"solar profile too short: {train_len} training steps "
                                  f"for {self.horizon}-step episodes")
        else:
            self.horizon = horizon or config.eval_steps
            self.eval_start = total - self.horizon if eval_start is None else eval_start
            if self.eval_start < 0 or self.eval_start + self.horizon > total:
                raise ConfigError(f"evaluation window [{self.eval_start}, "
                                  f"{self.eval_start + self.horizon}) outside profile of length {total}")
        self.t = 0
        self.done = True

    # -- episode -----------------------------------------------------------------
    def reset(self, start: int | None = None) -> np.ndarray:
        cfg = self.cfg
        if start is None:
            if self.mode == "train":
                start = int(self.streams["env"].integers(0, self.max_start + 1))
            else:
                start = self.eval_start
        self.start = start
        self.window = self.profile.window(start, self.horizon)
        self.field = sample_field((cfg.grid_rows, cfg.grid_cols), cfg.sigma, cfg.l0, self.streams["field"])
        n = self.n
        self.battery = np.full(n, cfg.battery_capacity)
        self.modes = np.full(n, int(Mode.IDLE))
        if not self.controlled[self.gw]:
            self.modes[self.gw] = int(Mode.ACTIVE)
        self.delta = np.zeros(n)
        self.forced = np.zeros(n, dtype=bool)
        self.tracker = [OnlineDegradation(cfg.deg_A, cfg.deg_B) for _ in range(n)]
        for tr in self.tracker:
            tr.push(1.0)
        self.deg = np.zeros(n)
        self.t = 0
        self.done = False
        self.active_steps = np.zeros(n, dtype=int)
        self.mode_counts = np.zeros((n, 3), dtype=int)
        self.log: list[dict] = []
        return self.observation()

    def observation(self) -> np.ndarray:
        cfg = self.cfg
        cols = [self.battery / cfg.battery_capacity, self.modes / 2.0, self.delta / cfg.battery_capacity]
        if cfg.degradation_in_state:
            cols.append(self.deg / 100.0)
        return np.stack(cols, axis=1)

    def step(self, action) -> StepResult:
        if self.done:
            raise EnvStateError("episode finished; call reset()")
        cfg = self.cfg
        action = np.asarray(action, dtype=int)
        if action.shape != (self.n,):
            raise ValueError(f"action must have shape ({self.n},), got {action.shape}")
        if ((action < 0) | (action > 2)).any():
            raise ValueError("mode commands must be 0, 1 or 2")

        # (1) links, (2) commands apply only where the link succeeded
        ok = sample_links(self.links, self.topology, self.streams["comms"])
        modes = np.where(ok, action, self.modes)
        if not self.controlled[self.gw]:
            modes[self.gw] = int(Mode.ACTIVE)
        # (3) reserve protection
        held = self.forced.copy()
        modes[held] = int(Mode.SLEEP)

        # (4)-(5) energy balance
        e_mu = float(self.window.baseline_energy[self.t])
        e_h = harvested_energy(self.window, self.field, self.topology, self.t)
        e_c = self._powers[modes] * cfg.delta_t
        new, delta, below = battery_step(self.battery, e_h, e_c, cfg)
        if not self.controlled[self.gw]:
            new[self.gw], delta[self.gw], below[self.gw] = cfg.battery_capacity, 0.0, False
        released = self.forced & (new >= cfg.active_count_threshold)
        self.forced = below | (self.forced & ~released)

        # (6) degradation
        soc = new / cfg.battery_capacity
        for i in np.flatnonzero(self.controlled):
            self.deg[i] = self.tracker[i].push(soc[i])

        self.battery, self.delta, self.modes = new, delta, modes
        self.t += 1

        # (7)-(8) reward
        eligible = (modes == Mode.ACTIVE) & (new > cfg.active_count_threshold) & ok & self.controlled
        c_a = int(eligible.sum())
        r1 = utility_reward(c_a, self.n_controlled, cfg.steps_per_episode)
        r2 = degradation_spread(self.deg[self.controlled])
        reward = cfg.alpha1 * r1
        if cfg.degradation_in_reward:
            reward -= cfg.alpha2 * r2

        self.active_steps += eligible
        self.mode_counts[np.arange(self.n), modes] += 1
        self.done = self.t >= self.horizon
        info = {"active_count": c_a, "r1": r1, "r2": r2, "comm_successes": int(ok[self.controlled].sum()),
                "forced_sleeps": int(held.sum()), "E_mu": e_mu,
                "link_ok": ok, "eligible": eligible}
        if self.trace:
            self.log.append({"t": self.t, "C_a": c_a, "r1": r1, "r2": r2, "reward": reward,
                             "E_mu": e_mu, "modes": "".join(str(m) for m in modes)})
        return StepResult(self.observation(), float(reward), self.done, info)

    def write_step_log(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=STEP_LOG_FIELDS)
            w.writeheader()
            for row in self.log:
                w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
