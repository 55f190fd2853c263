"""Distance-based urban micro-cell channel gains with probabilistic LOS.

Pure pathloss: no shadowing and no fast fading.  Every directed link draws
its own LOS state, so reciprocity is not assumed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BS_HEIGHT = 10.0        # m
MIN_DISTANCE = 3.0      # m; shorter links are clamped (model extrapolation)


@dataclass
class ChannelGains:
    """Linear power gains for every useful and interference channel.

    ``h_cu_d2d[i, j]`` is CU i -> D2D receiver j; ``h_d2d_d2d[j, d]`` is D2D
    transmitter d -> D2D receiver j (diagonal = own link ``h_self``).
    """

    h_cu_bs: np.ndarray
    h_d2d_bs: np.ndarray
    h_cu_d2d: np.ndarray
    h_d2d_d2d: np.ndarray
    los_cu_bs: np.ndarray
    los_d2d_bs: np.ndarray
    los_cu_d2d: np.ndarray
    los_d2d_d2d: np.ndarray

    @property
    def h_self(self):
        return np.diagonal(self.h_d2d_d2d)


def los_probability(d):
    """Probability of line of sight at distance d (metres)."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    p = np.minimum(18.0 / d, 1.0) * (1.0 - np.exp(-d / 36.0)) + np.exp(-d / 36.0)
    return np.clip(p, 0.0, 1.0)


def pathloss_db(d, fc, los):
    """Urban micro-cell single-slope pathloss in dB.

    LOS:  22.7 log10(d) + 41.0 + 20 log10(fc_GHz / 5)
    NLOS: (44.9 - 6.55 log10(h_BS)) log10(d) + 16.33 + 5.83 log10(h_BS)
          + 23 log10(fc_GHz / 5)       with h_BS = 10 m.
    """
    d = np.asarray(d, dtype=float)
    fc_ghz = fc / 1e9
    los_pl = 22.7 * np.log10(d) + 41.0 + 20.0 * np.log10(fc_ghz / 5.0)
    nlos_pl = ((44.9 - 6.55 * np.log10(BS_HEIGHT)) * np.log10(d)
               + 16.33 + 5.83 * np.log10(BS_HEIGHT)
               + 23.0 * np.log10(fc_ghz / 5.0))
    pl = np.where(los, los_pl, nlos_pl)
    return np.maximum(pl, 0.0)


def _link_gain(dist, fc, rng):
    d = np.maximum(dist, MIN_DISTANCE)
    los = rng.uniform(size=d.shape) < los_probability(d)
    gain = 10.0 ** (-pathloss_db(d, fc, los) / 10.0)
    return gain, los


def gains_from_placement(placement, config, rng):
    """Draw LOS states and compute all link gains for one topology.

    Draw order is fixed (CU->BS, D2D->BS, CU->D2D, D2D->D2D) so results are
    reproducible for a given generator state.
    """
    fc = config.carrier_freq
    d_cu_bs = np.linalg.norm(placement.cu_pos, axis=1)
    d_d2d_bs = np.linalg.norm(placement.d2d_tx_pos, axis=1)
    # [i, j]: CU i to receiver j
    d_cu_d2d = np.linalg.norm(
        placement.cu_pos[:, None, :] - placement.d2d_rx_pos[None, :, :], axis=2)
    # [j, d]: transmitter d to receiver j
    d_d2d_d2d = np.linalg.norm(
        placement.d2d_tx_pos[None, :, :] - placement.d2d_rx_pos[:, None, :], axis=2)

    h_cu_bs, los_cu_bs = _link_gain(d_cu_bs, fc, rng)
    h_d2d_bs, los_d2d_bs = _link_gain(d_d2d_bs, fc, rng)
    h_cu_d2d, los_cu_d2d = _link_gain(d_cu_d2d, fc, rng)
    h_d2d_d2d, los_d2d_d2d = _link_gain(d_d2d_d2d, fc, rng)
    return ChannelGains(h_cu_bs=h_cu_bs, h_d2d_bs=h_d2d_bs,
                        h_cu_d2d=h_cu_d2d, h_d2d_d2d=h_d2d_d2d,
                        los_cu_bs=los_cu_bs, los_d2d_bs=los_d2d_bs,
                        los_cu_d2d=los_cu_d2d, los_d2d_d2d=los_d2d_d2d)


def gains_to_csv(gains, path):
    """Debug dump: ``link_type,i,j,gain_db,los`` rows."""
    rows = ["link_type,i,j,gain_db,los"]
    for i, (g, s) in enumerate(zip(gains.h_cu_bs, gains.los_cu_bs)):
        rows.append("cu_bs,%d,0,%.9g,%d" % (i, 10 * np.log10(g), s))
    for j, (g, s) in enumerate(zip(gains.h_d2d_bs, gains.los_d2d_bs)):
        rows.append("d2d_bs,%d,0,%.9g,%d" % (j, 10 * np.log10(g), s))
    for i in range(gains.h_cu_d2d.shape[0]):
        for j in range(gains.h_cu_d2d.shape[1]):
            rows.append("cu_d2d,%d,%d,%.9g,%d"
                        % (i, j, 10 * np.log10(gains.h_cu_d2d[i, j]),
                           gains.los_cu_d2d[i, j]))
    for j in range(gains.h_d2d_d2d.shape[0]):
        for d in range(gains.h_d2d_d2d.shape[1]):
            rows.append("d2d_d2d,%d,%d,%.9g,%d"
                        % (j, d, 10 * np.log10(gains.h_d2d_d2d[j, d]),
                           gains.los_d2d_d2d[j, d]))
    with open(path, "w") as fh:
        fh.write("\n".join(rows) + "\n")
