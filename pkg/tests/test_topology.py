import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from femtorelay.config import RangeError, ScenarioConfig
from femtorelay.topology import LinkClass, channel_gain, generate_topology, path_loss_db, rssi_dbm
from conftest import hand_topology


def test_minimal_instance():
    cfg = ScenarioConfig(num_mues=1, num_fbs=1, num_subchannels=1)
    t = generate_topology(cfg, seed=3)
    assert t.num_nodes == 4
    # five directed link classes: MUE-MBS, MUE-FBS, FUE-MBS, FUE-FBS, FBS-MBS
    shapes = [t.gain_mue_mbs.shape, t.gain_mue_fbs.shape, t.gain_fue_mbs.shape, t.gain_fue_fbs.shape,
              t.gain_fbs_mbs.shape]
    assert shapes == [(1,), (1, 1), (1,), (1, 1), (1,)]


def test_same_seed_same_topology():
    cfg = ScenarioConfig(num_mues=5, num_fbs=20)
    assert generate_topology(cfg, 7) == generate_topology(cfg, 7)
    assert generate_topology(cfg, 7) != generate_topology(cfg, 8)


def test_geometry_over_seed_sweep():
    cfg = ScenarioConfig(num_mues=5, num_fbs=80)
    for seed in range(100):
        t = generate_topology(cfg, seed)
        assert np.all(np.hypot(*t.mue_positions.T) <= 400.0)
        assert np.all(np.hypot(*t.fbs_positions.T) <= 400.0)
        assert np.all(np.linalg.norm(t.fue_positions - t.fbs_positions, axis=1) <= 20.0)
        # MUEs are outdoor: outside every femtocell disk
        d = np.linalg.norm(t.mue_positions[:, None] - t.fbs_positions[None], axis=2)
        assert np.all(d > 20.0)
        assert np.all(t.gain_mue_mbs > 0) and np.all(np.isfinite(t.gain_fue_fbs))


def test_arrays_are_read_only():
    t = generate_topology(ScenarioConfig(num_mues=2, num_fbs=4), 0)
    with pytest.raises(ValueError):
        t.gain_mue_mbs[0] = 1.0


def test_fewer_fbs_than_mues_rejected():
    with pytest.raises(RangeError) as exc:
        generate_topology(ScenarioConfig(num_mues=5, num_fbs=3), 0)
    assert exc.value.key == "num_fbs"


def test_subchannel_plan():
    t = generate_topology(ScenarioConfig(num_mues=3, num_fbs=10, num_subchannels=4, num_ota_channels=3), 0)
    assert list(t.fue_subchannel) == [f % 4 for f in range(10)]
    assert list(t.active_fues(1)) == [1, 5, 9]
    assert list(t.co_channel_fbs(0)) == [3, 6, 9]
    assert list(t.mues_on(2)) == [2]


def test_outdoor_path_loss_at_1km():
    assert path_loss_db(LinkClass.OUTDOOR, 1000.0) == pytest.approx(128.1)


def test_outdoor_to_indoor_adds_wall_at_1km():
    assert path_loss_db(LinkClass.OUTDOOR_TO_INDOOR, 1000.0) == pytest.approx(128.1 + 12.0)


def test_indoor_path_loss():
    assert path_loss_db(LinkClass.INDOOR, 10.0) == pytest.approx(58.46)


@given(st.floats(1.0, 5000.0), st.floats(1.0, 5000.0), st.sampled_from(list(LinkClass)))
def test_path_loss_monotone(d1, d2, cls):
    lo, hi = sorted((d1, d2))
    assert path_loss_db(cls, hi) >= path_loss_db(cls, lo)


def test_channel_gain_examples():
    assert channel_gain(0.0, 0.0) == 1.0
    assert channel_gain(30.0, 0.0) == pytest.approx(1e-3, rel=1e-12)


def test_shadowing_log_mean():
    rng = np.random.default_rng(0)
    g = channel_gain(100.0, rng.normal(0.0, 10.0, 10_000))
    assert abs(np.mean(10 * np.log10(g)) + 100.0) < 0.5


def test_rssi_examples():
    cfg = ScenarioConfig()
    t = hand_topology(M=1, F=2, g_mue_fbs=[[1.0, 1e-9]])
    assert rssi_dbm(0, 0, t, cfg) == pytest.approx(20.0)
    assert rssi_dbm(0, 1, t, cfg) == pytest.approx(-70.0)
    assert rssi_dbm(0, 0, t, cfg) > rssi_dbm(0, 1, t, cfg)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_gains_consistent_with_distance_classes(seed):
    cfg = ScenarioConfig(num_mues=2, num_fbs=5, shadow_std_db=0.0)
    t = generate_topology(cfg, seed)
    d = np.hypot(*t.mue_positions.T)
    assert np.allclose(t.gain_mue_mbs, 10 ** (-path_loss_db(LinkClass.OUTDOOR, d) / 10), rtol=1e-12)
    # own FUE link is indoor, hence stronger than the wall-crossing link of any FUE at the same distance
    own = np.linalg.norm(t.fue_positions - t.fbs_positions, axis=1)
    assert np.allclose(np.diag(t.gain_fue_fbs), 10 ** (-path_loss_db(LinkClass.INDOOR, own) / 10), rtol=1e-12)
    assert math.isfinite(float(np.sum(t.gain_fue_fbs)))
