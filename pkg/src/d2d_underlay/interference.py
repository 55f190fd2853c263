"""SINR and leakage-interference expressions on top of tables and gains.

Conventions: RB ``r`` occupies subcarriers ``[r*S, r*S + S - 1]`` of a
contiguous band (S = subcarriers per RB); CU transmit power is spread
uniformly over the 12 subcarriers of its RB; noise is per-subcarrier, with
the per-RB aggregate ``S * noise_sc`` used in the CU SINR.

Scalar operations mirror the analytical expressions one index at a time;
``*_matrix`` variants are the vectorised forms the simulator uses.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .waveform import WaveformType


@dataclass
class SpectrumMap:
    """RB occupancy: which CU owns each RB and which RB each pair reuses."""

    rb_of_cu: np.ndarray
    num_rbs: int
    subcarriers_per_rb: int
    rb_of_d2d: np.ndarray | None = None

    def validate(self):
        if sorted(self.rb_of_cu.tolist()) != list(range(self.num_rbs)):
            raise ValueError("rb_of_cu must be a bijection over RBs")
        if self.rb_of_d2d is not None:
            rbs = self.rb_of_d2d.tolist()
            if len(set(rbs)) != len(rbs):
                raise ValueError("rb_of_d2d must be injective")
            if rbs and not (0 <= min(rbs) and max(rbs) < self.num_rbs):
                raise ValueError("rb_of_d2d out of range")
        return self

    def with_assignment(self, rb_of_d2d):
        return SpectrumMap(rb_of_cu=self.rb_of_cu, num_rbs=self.num_rbs,
                           subcarriers_per_rb=self.subcarriers_per_rb,
                           rb_of_d2d=np.asarray(rb_of_d2d)).validate()


def random_cu_map(config, rng):
    """Random RB-to-CU bijection (pathloss-only channel makes it arbitrary)."""
    return SpectrumMap(rb_of_cu=rng.permutation(config.num_rbs),
                       num_rbs=config.num_rbs,
                       subcarriers_per_rb=config.subcarriers_per_rb).validate()


@dataclass
class PowerAllocation:
    """Transmit powers: per-subcarrier for D2D pairs, per-RB total for CUs."""

    p_d2d: np.ndarray     # (pairs, subcarriers per RB), W
    p_cu: np.ndarray      # (CUs,), W per RB

    def validate(self, max_tx_power_w=None):
        if np.any(self.p_d2d < 0):
            raise ValueError("negative D2D subcarrier power")
        if max_tx_power_w is not None:
            tot = self.p_d2d.sum(axis=1)
            if np.any(tot > max_tx_power_w * (1 + 1e-9)):
                raise ValueError("per-pair power exceeds the cap")
        return self


def uniform_cu_powers(config):
    """Every CU transmits the full power budget over its RB."""
    return np.full(config.num_cus, config.cu_tx_power_w)


def _offset_index(smap, rb_victim, rb_interferer):
    return rb_victim - rb_interferer + smap.num_rbs - 1


# ---------------------------------------------------------------------------
# vectorised forms
# ---------------------------------------------------------------------------

def d2d_to_cu_load_matrix(gains, powers, table, smap):
    """Per-CU aggregate D2D leakage seen at the BS, in W: element ``i`` is
    ``sum_j h_jB * sum_m sum_k (P_jm / P0) I(|k - m|)`` over CU i's RB."""
    kern = table.band_kernels(smap.num_rbs, smap.subcarriers_per_rb)
    d = _offset_index(smap, smap.rb_of_cu[:, None], smap.rb_of_d2d[None, :])
    w = kern.by_interferer[d]                     # (CU, pair, m)
    return np.einsum("j,jm,ijm->i", gains.h_d2d_bs, powers.p_d2d,
                     w) / table.reference_power


def cu_sinr_all(gains, powers, tables, smap, noise_sc, d2d_kind=None):
    """Linear SINR of every CU at the BS (per-RB aggregation)."""
    sigma2 = noise_sc * smap.subcarriers_per_rb
    if smap.rb_of_d2d is None or d2d_kind is None:
        interference = 0.0
    else:
        table = tables[(d2d_kind, WaveformType.OFDM)]
        interference = d2d_to_cu_load_matrix(gains, powers, table, smap)
    return powers.p_cu * gains.h_cu_bs / (sigma2 + interference)


def i_cu_matrix(gains, powers, table, smap):
    """CU-generated interference at every (pair, subcarrier) in W; the table
    must be OFDM -> victim-waveform."""
    kern = table.band_kernels(smap.num_rbs, smap.subcarriers_per_rb)
    # victim subcarrier m of pair j, summed over the CU's interfering RB
    d = _offset_index(smap, smap.rb_of_d2d[None, :], smap.rb_of_cu[:, None])
    w = kern.by_victim[d]                         # (CU, pair, m)
    p_sc = powers.p_cu / smap.subcarriers_per_rb
    return np.einsum("ij,i,ijm->jm", gains.h_cu_d2d, p_sc,
                     w) / table.reference_power


def i_d2d_matrix(gains, powers, table, smap):
    """Inter-D2D interference at every (pair, subcarrier) in W; the table is
    the D2D waveform against itself."""
    kern = table.band_kernels(smap.num_rbs, smap.subcarriers_per_rb)
    d = _offset_index(smap, smap.rb_of_d2d[:, None], smap.rb_of_d2d[None, :])
    w = kern.sub[d]                               # (j, d, n, m): interferer n -> victim m
    h = gains.h_d2d_d2d.copy()
    np.fill_diagonal(h, 0.0)                      # a pair does not jam itself
    out = np.einsum("jd,dn,jdnm->jm", h, powers.p_d2d, w)
    return out / table.reference_power


def d2d_sinr_matrices(gains, powers, tables, smap, noise_sc, d2d_kind):
    """(actual, predicted) linear SINR arrays of shape (pairs, subcarriers)."""
    i_cu = i_cu_matrix(gains, powers, tables[(WaveformType.OFDM, d2d_kind)], smap)
    i_dd = i_d2d_matrix(gains, powers, tables[(d2d_kind, d2d_kind)], smap)
    num = powers.p_d2d * gains.h_self[:, None]
    actual = num / (noise_sc + i_cu + i_dd)
    predicted = num / (noise_sc + i_cu)
    return actual, predicted


def cu_to_d2d_cost_matrix(gains, powers, table, smap):
    """Interference (W) each pair would receive from all CUs on each RB; the
    assignment cost matrix.  The table must be OFDM -> D2D-waveform."""
    kern = table.band_kernels(smap.num_rbs, smap.subcarriers_per_rb)
    rbs = np.arange(smap.num_rbs)
    d = _offset_index(smap, rbs[None, :], smap.rb_of_cu[:, None])
    w = kern.band[d]                              # (CU, RB)
    p_sc = powers.p_cu / smap.subcarriers_per_rb
    return np.einsum("ij,i,ir->jr", gains.h_cu_d2d, p_sc,
                     w) / table.reference_power


# ---------------------------------------------------------------------------
# scalar forms (one index at a time)
# ---------------------------------------------------------------------------

def omega_d2d_to_cu(pair, cu, gains, powers, table, smap):
    """Leakage power ratio of one pair's whole RB onto one CU's RB, already
    weighted by the pair-to-BS gain."""
    kern = table.band_kernels(smap.num_rbs, smap.subcarriers_per_rb)
    d = _offset_index(smap, smap.rb_of_cu[cu], smap.rb_of_d2d[pair])
    omega = float(powers.p_d2d[pair] @ kern.by_interferer[d]) / table.reference_power
    return gains.h_d2d_bs[pair] * omega


def cu_sinr(cu, gains, powers, tables, smap, noise_sc, d2d_kind=None):
    return float(cu_sinr_all(gains, powers, tables, smap, noise_sc,
                             d2d_kind)[cu])


def i_cu_at_d2d(pair, subcarrier, gains, powers, tables, smap, d2d_kind):
    table = tables[(WaveformType.OFDM, d2d_kind)]
    return float(i_cu_matrix(gains, powers, table, smap)[pair, subcarrier])


def i_d2d_at(pair, subcarrier, gains, powers, tables, smap, d2d_kind):
    table = tables[(d2d_kind, d2d_kind)]
    return float(i_d2d_matrix(gains, powers, table, smap)[pair, subcarrier])


def d2d_sinr_actual(pair, subcarrier, gains, powers, tables, smap, noise_sc,
                    d2d_kind):
    actual, _ = d2d_sinr_matrices(gains, powers, tables, smap, noise_sc, d2d_kind)
    return float(actual[pair, subcarrier])


def d2d_sinr_predicted(pair, subcarrier, gains, powers, tables, smap, noise_sc,
                       d2d_kind):
    _, predicted = d2d_sinr_matrices(gains, powers, tables, smap, noise_sc,
                                     d2d_kind)
    return float(predicted[pair, subcarrier])
