"""Monte Carlo topologies: cell, cellular users and clustered D2D pairs."""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from enum import Enum

import numpy as np

# 3 m floor between any transmitter and any receiver, below which the
# pathloss model is not meaningful.
MIN_LINK_DISTANCE = 3.0
_MAX_RESAMPLE = 200


class ConfigurationError(ValueError):
    """Scenario configuration violates a geometric or structural constraint."""


class Layout(Enum):
    CLUSTERED = "CLUSTERED"
    NON_CLUSTERED = "NON_CLUSTERED"


@dataclass(frozen=True)
class ScenarioConfig:
    """Full description of one simulation scenario.

    Distances in metres, frequencies in Hz, powers in dBm, SINR in dB.
    Defaults follow an LTE-like 500 m inter-site-distance macro cell.
    """

    cell_radius: float = 250.0
    carrier_freq: float = 700e6
    subcarrier_spacing: float = 15e3
    num_rbs: int = 15
    subcarriers_per_rb: int = 12
    num_cus: int = 15
    num_d2d_pairs: int = 10
    layout: Layout = Layout.CLUSTERED
    cluster_radius_min: float = 50.0
    cluster_radius_max: float = 100.0
    cluster_radius_fixed: float | None = None
    cluster_distance_fixed: float | None = None
    d2d_max_link_factor: float = 2.0 / 3.0
    cu_min_sinr: float = 10.0
    noise_per_subcarrier: float = -127.0
    max_tx_power: float = 24.0
    cu_tx_power: float = 24.0
    iterations: int = 2000
    seed: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.num_d2d_pairs > self.num_rbs:
            raise ConfigurationError(
                "num_d2d_pairs (%d) must not exceed num_rbs (%d): the RB map "
                "must be injective" % (self.num_d2d_pairs, self.num_rbs))
        if self.num_cus != self.num_rbs:
            raise ConfigurationError(
                "num_cus (%d) must equal num_rbs (%d): fully loaded cell"
                % (self.num_cus, self.num_rbs))
        if self.cluster_radius_min > self.cluster_radius_max:
            raise ConfigurationError("cluster_radius_min > cluster_radius_max")
        for name in ("cell_radius", "carrier_freq", "subcarrier_spacing",
                     "cluster_radius_min", "cluster_radius_max",
                     "d2d_max_link_factor"):
            if getattr(self, name) <= 0:
                raise ConfigurationError("%s must be positive" % name)
        if self.num_rbs < 1 or self.subcarriers_per_rb < 1:
            raise ConfigurationError("need at least one RB and subcarrier")
        if self.num_d2d_pairs < 1:
            raise ConfigurationError("need at least one D2D pair")
        if self.cluster_radius_fixed is not None and self.cluster_radius_fixed <= 0:
            raise ConfigurationError("cluster_radius_fixed must be positive")
        if self.cluster_distance_fixed is not None and self.cluster_distance_fixed < 0:
            raise ConfigurationError("cluster_distance_fixed must be >= 0")
        if self.iterations < 1:
            raise ConfigurationError("iterations must be >= 1")
        return self

    @property
    def noise_per_subcarrier_w(self):
        return 10.0 ** ((self.noise_per_subcarrier - 30.0) / 10.0)

    @property
    def max_tx_power_w(self):
        return 10.0 ** ((self.max_tx_power - 30.0) / 10.0)

    @property
    def cu_tx_power_w(self):
        return 10.0 ** ((self.cu_tx_power - 30.0) / 10.0)

    @property
    def max_link_distance(self):
        """Upper bound on tx-rx separation used by the non-clustered layout."""
        radius = (self.cluster_radius_fixed if self.cluster_radius_fixed
                  is not None else self.cluster_radius_max)
        return self.d2d_max_link_factor * radius


@dataclass
class NodePlacement:
    """One sampled topology; positions are (x, y) in metres, BS at origin."""

    bs_pos: np.ndarray
    cu_pos: np.ndarray
    d2d_tx_pos: np.ndarray
    d2d_rx_pos: np.ndarray
    cluster_centre: np.ndarray | None = None
    cluster_radius: float | None = None

    @property
    def link_distances(self):
        return np.linalg.norm(self.d2d_tx_pos - self.d2d_rx_pos, axis=1)


def _uniform_disc(rng, radius, centre=(0.0, 0.0), size=None):
    n = 1 if size is None else size
    r = radius * np.sqrt(rng.uniform(size=n))
    phi = rng.uniform(0.0, 2.0 * np.pi, size=n)
    pts = np.stack([r * np.cos(phi), r * np.sin(phi)], axis=1) + np.asarray(centre)
    return pts[0] if size is None else pts


def _draw_rx(rng, tx, max_link, cell_radius, all_tx):
    """Receiver at uniform angle and uniform distance in (0, max_link] from
    its transmitter, resampled to stay in the cell and off the 3 m floor."""
    for _ in range(_MAX_RESAMPLE):
        phi = rng.uniform(0.0, 2.0 * np.pi)
        d = rng.uniform(0.0, max_link)
        if d == 0.0:
            continue
        rx = tx + d * np.array([np.cos(phi), np.sin(phi)])
        if np.linalg.norm(rx) > cell_radius:
            continue
        if np.min(np.linalg.norm(all_tx - rx, axis=1)) < MIN_LINK_DISTANCE:
            continue
        return rx
    # fall back to the last in-cell candidate; the channel clamps distances
    while True:
        phi = rng.uniform(0.0, 2.0 * np.pi)
        d = rng.uniform(0.0, max_link)
        rx = tx + d * np.array([np.cos(phi), np.sin(phi)])
        if np.linalg.norm(rx) <= cell_radius:
            return rx


def _cluster_radius(config, rng):
    if config.cluster_radius_fixed is not None:
        radius = config.cluster_radius_fixed
    else:
        radius = rng.uniform(config.cluster_radius_min, config.cluster_radius_max)
    if radius > config.cell_radius:
        raise ConfigurationError(
            "cluster radius %.1f m does not fit in cell radius %.1f m"
            % (radius, config.cell_radius))
    return radius


def _assemble(config, rng, centre, radius):
    cu_pos = _uniform_disc(rng, config.cell_radius, size=config.num_cus)
    if centre is not None:
        tx = _uniform_disc(rng, radius, centre=centre, size=config.num_d2d_pairs)
        max_link = config.d2d_max_link_factor * radius
    else:
        tx = _uniform_disc(rng, config.cell_radius, size=config.num_d2d_pairs)
        max_link = config.max_link_distance
    rx = np.array([_draw_rx(rng, t, max_link, config.cell_radius, tx) for t in tx])
    return NodePlacement(bs_pos=np.zeros(2), cu_pos=cu_pos,
                         d2d_tx_pos=tx, d2d_rx_pos=rx,
                         cluster_centre=centre, cluster_radius=radius)


def sample_placement(config, rng):
    """Draw one topology; the cluster (if any) lies wholly inside the cell."""
    if config.layout is Layout.NON_CLUSTERED:
        return _assemble(config, rng, None, None)
    if config.cluster_distance_fixed is not None:
        return sample_placement_at_distance(config, rng,
                                            config.cluster_distance_fixed)
    radius = _cluster_radius(config, rng)
    centre = _uniform_disc(rng, config.cell_radius - radius)
    return _assemble(config, rng, centre, radius)


def sample_placement_at_distance(config, rng, cluster_distance):
    """As ``sample_placement`` with the cluster centre pinned at the given
    distance from the BS (angle uniform)."""
    radius = _cluster_radius(config, rng)
    if cluster_distance + radius > config.cell_radius:
        raise ConfigurationError(
            "cluster at distance %.1f m with radius %.1f m exceeds the cell "
            "radius %.1f m" % (cluster_distance, radius, config.cell_radius))
    phi = rng.uniform(0.0, 2.0 * np.pi)
    centre = cluster_distance * np.array([np.cos(phi), np.sin(phi)])
    return _assemble(config, rng, centre, radius)


# ---------------------------------------------------------------------------
# flat key-value config files
# ---------------------------------------------------------------------------

_FIELD_TYPES = {f.name: f for f in fields(ScenarioConfig)}


def _coerce(name, text):
    text = text.strip()
    if name == "layout":
        try:
            return Layout[text.upper()]
        except KeyError:
            raise ConfigurationError("unknown layout %r" % text)
    if name in ("cluster_radius_fixed", "cluster_distance_fixed"):
        if text.lower() in ("", "none"):
            return None
        return float(text)
    if name in ("num_rbs", "subcarriers_per_rb", "num_cus", "num_d2d_pairs",
                "iterations", "seed"):
        return int(text)
    return float(text)


def load_config(path):
    """Read a ``key = value`` config file (# comments) into a ScenarioConfig."""
    values = {}
    with open(path) as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(
                    "%s:%d: expected 'key = value', got %r" % (path, ln, raw.strip()))
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in _FIELD_TYPES:
                raise ConfigurationError("%s:%d: unknown key %r" % (path, ln, key))
            values[key] = _coerce(key, val)
    return ScenarioConfig(**values)


def save_config(config, path):
    lines = []
    for f in fields(ScenarioConfig):
        val = getattr(config, f.name)
        if isinstance(val, Layout):
            val = val.value
        lines.append("%s = %s" % (f.name, val))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def with_updates(config, **changes):
    """Copy of the config with fields replaced (and re-validated)."""
    return replace(config, **changes)


def placement_to_csv(placement, path):
    """Dump node positions as ``node_type,index,x,y`` rows."""
    rows = ["node_type,index,x,y", "bs,0,%.9g,%.9g" % tuple(placement.bs_pos)]
    for name, arr in (("cu", placement.cu_pos),
                      ("d2d_tx", placement.d2d_tx_pos),
                      ("d2d_rx", placement.d2d_rx_pos)):
        for i, (x, y) in enumerate(arr):
            rows.append("%s,%d,%.9g,%.9g" % (name, i, x, y))
    with open(path, "w") as fh:
        fh.write("\n".join(rows) + "\n")
