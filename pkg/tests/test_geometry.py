import numpy as np
import pytest
from scipy import stats

import d2d_underlay as d
from d2d_underlay import geometry as geo


def test_config_defaults_valid():
    cfg = d.ScenarioConfig()
    assert cfg.num_cus == cfg.num_rbs == 15
    assert cfg.max_tx_power_w == pytest.approx(10 ** (24 / 10) / 1000)
    assert cfg.noise_per_subcarrier_w == pytest.approx(10 ** (-127 / 10) / 1000)


def test_config_rejects_structural_violations():
    with pytest.raises(d.ConfigurationError):
        d.with_updates(d.ScenarioConfig(), num_d2d_pairs=16)
    with pytest.raises(d.ConfigurationError):
        d.with_updates(d.ScenarioConfig(), num_cus=14)
    with pytest.raises(d.ConfigurationError):
        d.with_updates(d.ScenarioConfig(), cluster_radius_min=120.0)
    with pytest.raises(d.ConfigurationError):
        d.with_updates(d.ScenarioConfig(), cell_radius=-1.0)
    with pytest.raises(d.ConfigurationError):
        d.with_updates(d.ScenarioConfig(), iterations=0)


def test_fixed_radius_containment(rng):
    cfg = d.with_updates(d.ScenarioConfig(), cluster_radius_fixed=70.0)
    for _ in range(50):
        p = d.sample_placement(cfg, rng)
        assert p.cluster_radius == 70.0
        dist = np.linalg.norm(p.d2d_tx_pos - p.cluster_centre, axis=1)
        assert np.all(dist <= 70.0 + 1e-9)


def test_cluster_radius_exceeding_cell_rejected(rng):
    cfg = d.with_updates(d.ScenarioConfig(), cluster_radius_fixed=251.0)
    with pytest.raises(d.ConfigurationError):
        d.sample_placement(cfg, rng)


def test_cu_positions_area_uniform(rng):
    cfg = d.ScenarioConfig()
    radii = []
    for _ in range(10_000 // cfg.num_cus + 1):
        p = d.sample_placement(cfg, rng)
        radii.extend(np.linalg.norm(p.cu_pos, axis=1))
    radii = np.asarray(radii[:10_000])
    ks = stats.kstest(radii / cfg.cell_radius, lambda r: r ** 2)
    assert ks.statistic < 0.02


def test_placement_at_distance(rng):
    cfg = d.with_updates(d.ScenarioConfig(), cluster_radius_fixed=70.0)
    p = d.sample_placement_at_distance(cfg, rng, 0.0)
    assert np.linalg.norm(p.cluster_centre) == pytest.approx(0.0, abs=1e-12)
    p = d.sample_placement_at_distance(cfg, rng, 180.0)   # 180 + 70 = 250
    assert np.linalg.norm(p.cluster_centre) == pytest.approx(180.0)
    with pytest.raises(d.ConfigurationError):
        d.sample_placement_at_distance(cfg, rng, 200.0)


def test_fixed_distance_via_config(rng):
    cfg = d.with_updates(d.ScenarioConfig(), cluster_radius_fixed=70.0,
                         cluster_distance_fixed=100.0)
    p = d.sample_placement(cfg, rng)
    assert np.linalg.norm(p.cluster_centre) == pytest.approx(100.0)


def test_determinism():
    cfg = d.ScenarioConfig()
    a = d.sample_placement(cfg, np.random.default_rng(5))
    b = d.sample_placement(cfg, np.random.default_rng(5))
    assert np.array_equal(a.cu_pos, b.cu_pos)
    assert np.array_equal(a.d2d_tx_pos, b.d2d_tx_pos)
    assert np.array_equal(a.d2d_rx_pos, b.d2d_rx_pos)


@pytest.mark.parametrize("layout", [geo.Layout.CLUSTERED, geo.Layout.NON_CLUSTERED])
def test_containment_invariants(layout, rng):
    cfg = d.with_updates(d.ScenarioConfig(), layout=layout)
    for _ in range(500):
        p = d.sample_placement(cfg, rng)
        r = cfg.cell_radius + 1e-9
        for arr in (p.cu_pos, p.d2d_tx_pos, p.d2d_rx_pos):
            assert np.all(np.linalg.norm(arr, axis=1) <= r)
        if layout is geo.Layout.CLUSTERED:
            dist = np.linalg.norm(p.d2d_tx_pos - p.cluster_centre, axis=1)
            assert np.all(dist <= p.cluster_radius + 1e-9)
            assert np.all(p.link_distances
                          <= cfg.d2d_max_link_factor * p.cluster_radius + 1e-9)
        else:
            assert np.all(p.link_distances <= cfg.max_link_distance + 1e-9)


def test_cluster_radius_range(rng):
    cfg = d.ScenarioConfig()
    radii = [d.sample_placement(cfg, rng).cluster_radius for _ in range(200)]
    assert min(radii) >= cfg.cluster_radius_min
    assert max(radii) <= cfg.cluster_radius_max


def test_config_file_round_trip(tmp_path):
    cfg = d.with_updates(d.ScenarioConfig(), cluster_radius_fixed=70.0,
                         layout=geo.Layout.NON_CLUSTERED, seed=42)
    path = tmp_path / "c.cfg"
    d.save_config(cfg, path)
    assert d.load_config(path) == cfg


def test_config_file_comments_and_errors(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("# a comment\nnum_d2d_pairs = 5  # trailing\nseed = 3\n")
    cfg = d.load_config(path)
    assert cfg.num_d2d_pairs == 5 and cfg.seed == 3

    path.write_text("frobnicate = 1\n")
    with pytest.raises(d.ConfigurationError):
        d.load_config(path)
    path.write_text("just some words\n")
    with pytest.raises(d.ConfigurationError):
        d.load_config(path)


def test_placement_csv(tmp_path, rng):
    p = d.sample_placement(d.ScenarioConfig(), rng)
    out = tmp_path / "p.csv"
    d.placement_to_csv(p, out)
    lines = out.read_text().splitlines()
    assert lines[0] == "node_type,index,x,y"
    assert len(lines) == 1 + 1 + 15 + 10 + 10
