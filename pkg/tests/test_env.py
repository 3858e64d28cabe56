import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wsnrl.battery import Mode
from wsnrl.config import ConfigError, NetworkConfig
from wsnrl.env import EnvStateError, WsnEnv, degradation_spread, episode_return, utility_reward

CFG = NetworkConfig()


def make(cfg=CFG, seed=0, **kw):
    return WsnEnv(cfg, seed, **kw)


def test_reset_state():
    env = make()
    obs = env.reset()
    assert obs.shape == (16, 4)
    np.testing.assert_array_equal(obs[:, 0], 1.0)
    np.testing.assert_array_equal(obs[1:, 1], 0.5)   # idle leaves
    assert obs[0, 1] == 0.0                          # gateway held active
    assert not obs[:, 2:].any()
    assert degradation_spread(env.deg[env.controlled]) == 0.0


def test_three_feature_observation():
    env = make(CFG.replace(degradation_in_state=False, degradation_in_reward=False))
    assert env.reset().shape == (16, 3)


def test_reset_is_deterministic():
    a, b = make(seed=3), make(seed=3)
    np.testing.assert_array_equal(a.reset(), b.reset())
    assert a.start == b.start
    np.testing.assert_array_equal(a.field.values, b.field.values)


def test_training_window_bounds():
    env = make()
    starts = np.array([(env.reset(), env.start)[1] for _ in range(10000)])
    train_len = len(env.profile) - CFG.eval_steps
    assert starts.min() >= 0 and starts.max() <= train_len - 240
    assert len(np.unique(starts)) > 1000


def test_profile_too_short():
    with pytest.raises(ConfigError, match="too short"):
        make(CFG.replace(solar_days=300))


def test_eval_window():
    env = make(mode="eval")
    env.reset()
    assert env.start == len(env.profile) - 2880 and env.horizon == 2880
    env = make(mode="eval", eval_start=100, horizon=50)
    env.reset()
    assert env.start == 100
    with pytest.raises(ConfigError):
        make(mode="eval", eval_start=len(env.profile) - 10, horizon=50)


def test_reward_formulas():
    assert utility_reward(16, 16, 240) == pytest.approx(1 / 240)
    assert 6 * utility_reward(16, 16, 240) == pytest.approx(0.025)
    assert degradation_spread([1.0, 3.0]) == pytest.approx(1 / 3)
    assert -0.05 * degradation_spread([1.0, 3.0]) == pytest.approx(-0.016667, abs=1e-6)
    assert degradation_spread([2.0, 2.0, 2.0]) == 0.0
    assert degradation_spread([0.0, 0.0]) == 0.0
    assert episode_return([0.025] * 240) == pytest.approx(6.0)


def test_all_active_ideal_step():
    # perfect links and abundant sun: every leaf counts
    cfg = CFG.replace(beta=1.0, r0=1e12)
    env = make(cfg)
    env.reset()
    env.step(np.zeros(16, dtype=int))
    res = env.step(np.zeros(16, dtype=int))
    assert res.info["active_count"] == 15
    assert res.info["r1"] == pytest.approx(1 / 240)


def test_failed_links_freeze_modes():
    env = make(CFG.replace(beta=0.0))
    env.reset()
    for _ in range(20):
        res = env.step(np.zeros(16, dtype=int))
        assert (env.modes[1:] == Mode.IDLE).all()
        assert res.info["active_count"] == 0 and res.info["r1"] == 0.0


def test_link_failure_keeps_previous_mode_exactly():
    env = make()
    env.reset()
    rng = np.random.default_rng(0)
    for _ in range(100):
        prev = env.modes.copy()
        forced = env.forced.copy()
        a = rng.integers(0, 3, 16)
        res = env.step(a)
        ok = res.info["link_ok"]
        for i in range(1, 16):
            if forced[i]:
                assert env.modes[i] == Mode.SLEEP
            elif ok[i]:
                assert env.modes[i] == a[i]
            else:
                assert env.modes[i] == prev[i]


def test_forced_sleep_and_release():
    cfg = CFG.replace(solar_days=5 * 365, panel_watts=0.0)
    env = make(cfg, mode="eval", horizon=40)
    env.reset()
    for _ in range(40):
        env.step(np.zeros(16, dtype=int))
    # no sun: every leaf drained below the reserve and is held asleep
    assert env.forced[1:].all()
    assert (env.modes[1:] == Mode.SLEEP).all()
    assert (env.battery[1:] < cfg.min_reserve).all()


def test_finished_episode_rejects_step():
    env = make(horizon=3)
    env.reset()
    for k in range(3):
        res = env.step(np.ones(16, dtype=int))
    assert res.done
    with pytest.raises(EnvStateError):
        env.step(np.ones(16, dtype=int))


def test_bad_actions():
    env = make()
    env.reset()
    with pytest.raises(ValueError):
        env.step(np.zeros(15, dtype=int))
    with pytest.raises(ValueError):
        env.step(np.full(16, 3))


def test_observation_rows_are_per_node():
    env = make()
    env.reset()
    env.step(np.zeros(16, dtype=int))
    base = env.observation().copy()
    env.battery[5] *= 0.5
    env.deg[5] += 1.0
    obs = env.observation()
    changed = np.flatnonzero((obs != base).any(axis=1))
    assert list(changed) == [5]


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([2, 16, 56]))
def test_reward_bounds_on_random_trajectories(seed, n):
    env = make(CFG.replace(node_count=n), seed=seed)
    env.reset()
    rng = np.random.default_rng(seed)
    r1s, r2s, rewards, deg_prev = [], [], [], env.deg.copy()
    while not env.done:
        res = env.step(rng.integers(0, 3, n))
        r1s.append(res.info["r1"])
        r2s.append(res.info["r2"])
        rewards.append(res.reward)
        assert (env.deg >= deg_prev).all()
        assert 0 <= env.battery.min() and env.battery.max() <= CFG.battery_capacity
        deg_prev = env.deg.copy()
    assert all(0 <= r <= 1 / 240 + 1e-15 for r in r1s)
    assert sum(r1s) <= 1 + 1e-12
    assert all(0 <= r <= 0.5 for r in r2s)
    assert episode_return(rewards) <= 6.0 + 1e-12


def test_all_sleep_with_equal_degradation_returns_zero():
    env = make(CFG.replace(sigma=0.0, r0=1e12))
    env.reset()
    rewards = []
    while not env.done:
        rewards.append(env.step(np.full(16, 2)).reward)
    # identical nodes: identical degradation, nobody active
    assert np.ptp(env.deg[1:]) == 0.0
    assert episode_return(rewards) == 0.0


def test_step_log(tmp_path):
    env = make(trace=True, horizon=5)
    env.reset()
    for _ in range(5):
        env.step(np.zeros(16, dtype=int))
    env.write_step_log(tmp_path / "log.csv")
    lines = (tmp_path / "log.csv").read_text().splitlines()
    assert lines[0] == "t,C_a,r1,r2,reward,E_mu,modes"
    assert len(lines) == 6 and len(lines[1].split(",")[-1]) == 16


def test_gateway_participation_switch():
    env = make(CFG.replace(gateway_participates=True))
    obs = env.reset()
    assert env.controlled.all() and env.n_controlled == 16
    res = env.step(np.full(16, 2))
    assert env.modes[0] == Mode.SLEEP
