import numpy as np
import pytest

import d2d_underlay as d
from d2d_underlay import channel as ch


def test_los_probability_limits():
    assert d.los_probability(1e-6) == pytest.approx(1.0)
    # both branches saturate at 18 m
    assert d.los_probability(18.0) == pytest.approx(1.0, abs=1e-12)
    expected = 0.18 * (1 - np.exp(-100 / 36)) + np.exp(-100 / 36)
    assert d.los_probability(100.0) == pytest.approx(expected, abs=1e-12)
    with pytest.raises(ValueError):
        d.los_probability(0.0)
    with pytest.raises(ValueError):
        d.los_probability(-5.0)


def test_los_probability_monotone_decreasing():
    dd = np.linspace(18.0, 500.0, 200)
    p = d.los_probability(dd)
    assert np.all(np.diff(p) <= 1e-12)
    assert np.all((p >= 0) & (p <= 1))


def test_pathloss_los_reference_value():
    # 22.7*log10(100) + 41.0 + 20*log10(0.7/5)
    expected = 22.7 * 2 + 41.0 + 20 * np.log10(0.7 / 5.0)
    assert d.pathloss_db(100.0, 700e6, True) == pytest.approx(expected, abs=1e-9)
    assert expected == pytest.approx(69.32, abs=0.01)


def test_pathloss_monotone_in_distance():
    dd = np.linspace(3.0, 500.0, 300)
    for los in (True, False):
        pl = d.pathloss_db(dd, 700e6, los)
        assert np.all(np.diff(pl) > 0)


def test_nlos_exceeds_los_beyond_model_crossover():
    # the single-slope forms cross near 23 m at 700 MHz; above that the
    # obstructed path always loses more
    dd = np.linspace(25.0, 500.0, 200)
    assert np.all(d.pathloss_db(dd, 700e6, False) > d.pathloss_db(dd, 700e6, True))


def test_gains_clamped_and_bounded(rng):
    cfg = d.ScenarioConfig()
    p = d.sample_placement(cfg, rng)
    # force a coincident pair to exercise the 3 m clamp
    p.d2d_rx_pos[0] = p.d2d_tx_pos[0]
    g = d.gains_from_placement(p, cfg, rng)
    for arr in (g.h_cu_bs, g.h_d2d_bs, g.h_cu_d2d, g.h_d2d_d2d):
        assert np.all(np.isfinite(arr))
        assert np.all((arr > 0) & (arr <= 1))
    assert np.array_equal(g.h_self, np.diagonal(g.h_d2d_d2d))
    assert g.h_cu_d2d.shape == (cfg.num_cus, cfg.num_d2d_pairs)


def test_gains_determinism(rng):
    cfg = d.ScenarioConfig()
    p = d.sample_placement(cfg, rng)
    g1 = d.gains_from_placement(p, cfg, np.random.default_rng(3))
    g2 = d.gains_from_placement(p, cfg, np.random.default_rng(3))
    assert np.array_equal(g1.h_cu_d2d, g2.h_cu_d2d)
    assert np.array_equal(g1.los_d2d_d2d, g2.los_d2d_d2d)


def test_los_fraction_matches_probability(rng):
    dist = np.full(10_000, 50.0)
    _, los = ch._link_gain(dist, 700e6, rng)
    assert los.mean() == pytest.approx(d.los_probability(50.0), abs=0.02)


def test_gains_csv(tmp_path, rng):
    cfg = d.with_updates(d.ScenarioConfig(), num_d2d_pairs=2)
    p = d.sample_placement(cfg, rng)
    g = d.gains_from_placement(p, cfg, rng)
    out = tmp_path / "g.csv"
    d.gains_to_csv(g, out)
    lines = out.read_text().splitlines()
    assert lines[0] == "link_type,i,j,gain_db,los"
    assert len(lines) == 1 + 15 + 2 + 15 * 2 + 2 * 2
