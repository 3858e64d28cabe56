import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wsnrl.battery import Mode, battery_step, consumption
from wsnrl.config import NetworkConfig
from wsnrl.connectivity import LinkModel, link_probability, sample_links
from wsnrl.topology import Topology, generate_topology

CFG = NetworkConfig()


@pytest.mark.parametrize("mode,expected", [(Mode.ACTIVE, 1276.5), (Mode.IDLE, 510.6), (Mode.SLEEP, 1.2)])
def test_consumption_per_step(mode, expected):
    assert consumption(mode, CFG) == pytest.approx(expected, rel=1e-15)


def test_consumption_vectorised():
    np.testing.assert_allclose(consumption(np.array([0, 1, 2, 0]), CFG), [1276.5, 510.6, 1.2, 1276.5])


def test_battery_step_examples():
    s = battery_step(5000.0, 300.0, 1276.5, CFG)
    assert s.battery == pytest.approx(4023.5) and s.delta == pytest.approx(-976.5) and not s.forced_sleep
    s = battery_step(11050.0, 500.0, 0.0, CFG)
    assert s.battery == 11100.0 and s.delta == 50.0
    s = battery_step(600.0, 0.0, 1276.5, CFG)
    assert s.battery == 0.0 and s.forced_sleep


def test_battery_step_rejects_negative_harvest():
    with pytest.raises(ValueError):
        battery_step(100.0, -1.0, 0.0, CFG)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 9000), st.sampled_from([0, 1, 2])), min_size=1, max_size=60),
       st.floats(0, 11100))
def test_battery_stays_in_bounds_and_books_exactly(seq, b0):
    b = b0
    for harvest, mode in seq:
        used = consumption(mode, CFG)
        s = battery_step(b, harvest, used, CFG)
        assert 0.0 <= s.battery <= CFG.battery_capacity
        assert abs(s.delta) <= CFG.battery_capacity
        raw = b + harvest - used
        if 0.0 <= raw <= CFG.battery_capacity:
            assert s.battery == raw
        b = s.battery


@given(st.floats(0, 11100), st.floats(0, 9000))
def test_mode_ordering(b, harvest):
    a, i, s = (battery_step(b, harvest, consumption(m, CFG), CFG).battery for m in Mode)
    assert a <= i <= s


def test_link_probability_values():
    m = LinkModel()
    assert link_probability(m, 0.0) == 1.0
    assert link_probability(m, 1000.0) == pytest.approx(math.exp(-1), rel=1e-15)
    assert link_probability(m, 300.0) == pytest.approx(0.740818220681718, rel=1e-12)
    d = np.linspace(0, 5000, 200)
    p = link_probability(m, d)
    assert (np.diff(p) < 0).all() and (p > 0).all() and (p <= 1).all()
    with pytest.raises(ValueError):
        link_probability(m, -1.0)


def _line(distances):
    pos = np.array([[0.0, 0.0]] + [[d, 0.0] for d in distances])
    return Topology(pos, 0, np.zeros((len(pos), 2), dtype=int))


def test_sample_links_edge_cases():
    topo = generate_topology(16, 484.0)
    rng = np.random.default_rng(0)
    ok = sample_links(LinkModel(beta=0.0), topo, rng)
    assert ok[0] and not ok[1:].any()
    topo0 = _line([0.0, 0.0])
    assert all(sample_links(LinkModel(), topo0, rng).all() for _ in range(1000))


def test_link_success_monotone_for_shared_uniform():
    topo = _line([50.0, 300.0, 800.0, 2000.0])
    rng = np.random.default_rng(1)
    for _ in range(2000):
        u = np.full(5, rng.random())
        ok = sample_links(LinkModel(), topo, rng, u=u)
        # success at a distance implies success at every shorter one
        for far in range(2, 5):
            if ok[far]:
                assert ok[1:far].all()


def test_link_frequency_converges():
    topo = _line([300.0])
    rng = np.random.default_rng(11)
    n = 20000
    hits = sum(sample_links(LinkModel(), topo, rng)[1] for _ in range(n))
    p = math.exp(-0.3)
    assert abs(hits / n - p) < 3 * math.sqrt(p * (1 - p) / n)
