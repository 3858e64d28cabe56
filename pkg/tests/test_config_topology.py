import numpy as np
import pytest

from wsnrl.config import ConfigError, NetworkConfig, dump_config, load_config
from wsnrl.rng import STREAMS, seeded_rng_streams
from wsnrl.topology import generate_topology, load_coordinates, topology_for


def test_defaults_match_reference_values():
    c = NetworkConfig()
    assert (c.power_active, c.power_idle, c.power_sleep) == (425.5, 170.2, 0.4)
    assert c.battery_capacity == 3000 * 3.7
    assert c.active_count_threshold == c.power_active + c.min_reserve == 825.5
    assert (c.alpha1, c.alpha2, c.r0, c.beta, c.eta) == (6.0, 0.05, 1000.0, 1.0, 1.0)
    assert (c.sigma, c.l0, c.deg_A, c.deg_B) == (0.01, 5.0, 3351.0, -1.689)
    assert (c.delta_t, c.steps_per_episode, c.eval_steps) == (3.0, 240, 2880)


def test_config_file_round_trip_is_exact(tmp_path):
    c = NetworkConfig(alpha2=0.1 + 0.2, sigma=1 / 3)
    p = tmp_path / "c.yaml"
    p.write_text(dump_config(c))
    assert load_config(p, environ={}) == c
    assert load_config(None, environ={}) == NetworkConfig()


def test_env_overrides_and_precedence(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("alpha1: 3\nnode_count: 56\n")
    c = load_config(p, environ={"WSNRL_ALPHA1": "4.5", "WSNRL_DEGRADATION_IN_STATE": "false",
                                "OTHER": "x"})
    assert c.alpha1 == 4.5 and c.node_count == 56 and c.degradation_in_state is False
    assert load_config(p, environ={"WSNRL_ALPHA1": "4.5"}, alpha1=7.0).alpha1 == 7.0


@pytest.mark.parametrize("bad", [
    dict(node_count=1),
    dict(min_reserve=900.0),
    dict(power_idle=500.0),
    dict(sigma=-1.0),
    dict(gateway_index=16),
])
def test_invalid_configs_rejected(bad):
    with pytest.raises(ConfigError):
        NetworkConfig(**bad)


def test_unknown_key_rejected(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("alpah1: 3\n")
    with pytest.raises(ConfigError, match="alpah1"):
        load_config(p, environ={})


@pytest.mark.parametrize("n", [16, 56, 112])
def test_standard_layouts_within_gateway_range(n):
    t = generate_topology(n, 484.0)
    assert t.node_count == n
    assert t.gateway_index == 0
    np.testing.assert_allclose(t.positions[0], [242.0, 0.0])
    assert t.gateway_distances().max() <= 300.0


def test_minimal_network():
    t = generate_topology(2, 100.0)
    assert t.node_count == 2
    assert t.gateway_distances()[1] == pytest.approx(50.0)


def test_112_nodes_occupy_distinct_cells():
    t = generate_topology(112, 484.0)
    cells = {tuple(c) for c in t.cells}
    assert len(cells) == 112
    rows, cols = t.grid_shape
    # exhaustive check that each node sits in exactly one valid cell
    for r, c in t.cells:
        assert 0 <= r < rows and 0 <= c < cols
    assert sorted(t.flat_cells()) == sorted({int(r) * cols + int(c) for r, c in t.cells})


def test_topology_is_pure():
    a, b = generate_topology(56, 484.0), generate_topology(56, 484.0)
    np.testing.assert_array_equal(a.positions, b.positions)
    np.testing.assert_array_equal(a.cells, b.cells)


def test_strict_cases_mode():
    generate_topology(20, 484.0)
    with pytest.raises(ConfigError):
        generate_topology(20, 484.0, strict_cases=True)
    with pytest.raises(ConfigError):
        generate_topology(16, 1000.0, strict_cases=True)


def test_coordinate_file(tmp_path):
    p = tmp_path / "xy.csv"
    p.write_text("0,0\n100,0\n# comment\n200,10\n")
    t = load_coordinates(p, gateway_index=1)
    np.testing.assert_allclose(t.gateway_distances(), [100.0, 0.0, np.hypot(100, 10)])
    assert t.cells.shape == (3, 2)
    cfg = NetworkConfig(node_count=3, gateway_index=1, coordinate_file=str(p))
    assert topology_for(cfg).gateway_index == 1
    p.write_text("0,0\nbad\n")
    with pytest.raises(ConfigError, match=":2:"):
        load_coordinates(p, 0)


def test_rng_streams_reproducible_and_isolated():
    a, b = seeded_rng_streams(42), seeded_rng_streams(42)
    assert set(a) == set(STREAMS)
    for name in STREAMS:
        assert a[name].random() == b[name].random()
    ref = seeded_rng_streams(7)["comms"].random(100)
    s = seeded_rng_streams(7)
    s["solar_noise"].random(1000)
    np.testing.assert_array_equal(s["comms"].random(100), ref)
    assert not np.array_equal(seeded_rng_streams(1)["comms"].random(10), seeded_rng_streams(2)["comms"].random(10))
    assert not np.array_equal(seeded_rng_streams(1, worker=0)["env"].random(5),
                              seeded_rng_streams(1, worker=1)["env"].random(5))
