"""Prototype filters and inter-waveform subcarrier leakage tables.

The central object is the :class:`InterferenceTable`: the mean power that one
subcarrier of an interfering waveform injects into a subcarrier of a victim
waveform at spectral distance ``l``, averaged over the synchronisation offsets
of the two (asynchronous) links.  Tables can be produced two ways:

* ``table_from_psd``   -- integrate the interferer's power spectral density
  over the victim subcarrier band (ignores the victim's receive filtering).
* ``table_from_time_sim`` -- baseband time-domain model of the victim
  demodulator applied to the interferer's signal, averaged over random timing
  offsets; symbol randomness is averaged in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.signal import fftconvolve

# Frequency-sampling design for overlap factor 4: P2 = sqrt(2)/2 and
# P1^2 + P3^2 = 1, giving near-perfect reconstruction.
PHYDYAS_K4_COEFFS = (1.0, 0.971960, math.sqrt(2.0) / 2.0, 0.235147)

DEFAULT_CP_RATIO = 1.0 / 14.0   # normal LTE CP, averaged over the slot
DEFAULT_HALF_SPAN = 36          # 3 RBs; OFDM sidelobes < -40 dB beyond

PSD = "PSD"
TIME_SIM = "TIME_SIM"


class UnsupportedParameterError(ValueError):
    """A filter/waveform parameter outside the supported design space."""


class TableFormatError(ValueError):
    """Malformed interference-table file."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = "line %s, column %s: %s" % (line, column, message)
        super().__init__(message)


class TableValidationError(ValueError):
    """A loaded/constructed table violates a table invariant."""


class WaveformType(Enum):
    OFDM = "OFDM"
    FBMC_OQAM = "FBMC_OQAM"


@dataclass(frozen=True)
class WaveformKind:
    """A multicarrier waveform choice plus its cyclic-prefix ratio.

    ``cp_ratio`` is CP length over FFT size; FBMC/OQAM carries no CP.
    """

    kind: WaveformType
    cp_ratio: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.cp_ratio <= 0.25:
            raise UnsupportedParameterError(
                "cp_ratio must lie in [0, 0.25], got %r" % (self.cp_ratio,))
        if self.kind is WaveformType.FBMC_OQAM and self.cp_ratio != 0.0:
            raise UnsupportedParameterError("FBMC/OQAM has no cyclic prefix")

    @property
    def name(self):
        return self.kind.value


OFDM = WaveformKind(WaveformType.OFDM, DEFAULT_CP_RATIO)
FBMC = WaveformKind(WaveformType.FBMC_OQAM, 0.0)

_KIND_ALIASES = {
    "ofdm": OFDM,
    "fbmc": FBMC,
    "fbmc_oqam": FBMC,
    "fbmc/oqam": FBMC,
}


def parse_waveform(token):
    """Map a user-facing token like ``ofdm`` or ``fbmc`` to a WaveformKind."""
    try:
        return _KIND_ALIASES[token.strip().lower()]
    except KeyError:
        raise UnsupportedParameterError("unknown waveform %r" % (token,))


@dataclass(frozen=True)
class PrototypeFilter:
    """Unit-energy prototype filter for the filter-bank waveform."""

    overlap_factor: int
    freq_coeffs: tuple
    impulse_response: np.ndarray
    fft_size: int

    @property
    def length(self):
        return self.impulse_response.size


def build_phydyas_filter(overlap_factor, fft_size):
    """Build the overlap-4 frequency-sampling prototype filter.

    The impulse response is the standard cosine superposition of the
    frequency-sampling coefficients, normalised to unit energy.
    """
    if overlap_factor != 4:
        raise UnsupportedParameterError(
            "only overlap_factor=4 is supported, got %r" % (overlap_factor,))
    if fft_size < 64 or fft_size & (fft_size - 1):
        raise UnsupportedParameterError(
            "fft_size must be a power of two >= 64, got %r" % (fft_size,))
    K = overlap_factor
    P = PHYDYAS_K4_COEFFS
    n = np.arange(K * fft_size)
    h = np.full(n.shape, P[0])
    for k in range(1, K):
        h = h + 2.0 * (-1) ** k * P[k] * np.cos(2.0 * np.pi * k * n / (K * fft_size))
    h = h / math.sqrt(np.sum(h * h))
    return PrototypeFilter(overlap_factor=K, freq_coeffs=P,
                           impulse_response=h, fft_size=fft_size)


@dataclass(frozen=True)
class BandKernels:
    """RB-granular lookup arrays derived from an InterferenceTable."""

    sub: np.ndarray
    by_interferer: np.ndarray
    by_victim: np.ndarray
    band: np.ndarray


@dataclass
class InterferenceTable:
    """Mean leakage coefficients I(l) over spectral distance l in [-L, L].

    Coefficients are power ratios relative to ``reference_power`` (1 W per
    subcarrier by convention); leakage beyond ``half_span`` is truncated to 0.
    """

    interferer: WaveformKind
    victim: WaveformKind
    half_span: int
    coeffs: dict
    reference_power: float = 1.0
    method: str = PSD
    _kernel_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def coeff(self, l):
        """I(l); zero beyond the half span by definition."""
        return self.coeffs.get(int(l), 0.0)

    def coeff_array(self):
        L = self.half_span
        return np.array([self.coeffs[l] for l in range(-L, L + 1)])

    def validate(self):
        L = self.half_span
        if L < 1:
            raise TableValidationError("half_span must be >= 1")
        missing = [l for l in range(-L, L + 1) if l not in self.coeffs]
        if missing:
            raise TableValidationError(
                "coefficient map has gaps at l=%s" % (missing[:5],))
        extra = set(self.coeffs) - set(range(-L, L + 1))
        if extra:
            raise TableValidationError(
                "coefficients outside [-L, L]: %s" % (sorted(extra)[:5],))
        for l, v in self.coeffs.items():
            if v < 0.0:
                raise TableValidationError("I(%d) = %r is negative" % (l, v))
        for l in range(1, L + 1):
            if abs(self.coeffs[l] - self.coeffs[-l]) >= 1e-9:
                raise TableValidationError("table not symmetric at l=%d" % l)
        if self.reference_power <= 0.0:
            raise TableValidationError("reference_power must be positive")
        return self

    def band_kernels(self, num_rbs, subcarriers_per_rb):
        """Per-RB-offset lookup kernels, cached on the table.

        For RB offset ``d`` = victim RB minus interferer RB (stored at index
        ``d + num_rbs - 1``) and RB-local subcarrier indices ``m``
        (interferer) and ``k`` (victim):

        * ``sub[d, m, k]``:          I(|S*d + k - m|),
        * ``by_interferer[d, m]``:   sum over victim subcarriers k,
        * ``by_victim[d, k]``:       sum over interferer subcarriers m,
        * ``band[d]``:               sum over both.
        """
        key = (num_rbs, subcarriers_per_rb)
        hit = self._kernel_cache.get(key)
        if hit is not None:
            return hit
        S = subcarriers_per_rb
        d = np.arange(-(num_rbs - 1), num_rbs)
        m = np.arange(S)
        k = np.arange(S)
        dist = np.abs(S * d[:, None, None] + k[None, None, :] - m[None, :, None])
        L = self.half_span
        flat = np.zeros(dist.max() + 1)
        for l in range(0, L + 1):
            if l < flat.size:
                flat[l] = self.coeffs.get(l, 0.0)
        sub = flat[dist]
        out = BandKernels(sub=sub, by_interferer=sub.sum(axis=2),
                          by_victim=sub.sum(axis=1), band=sub.sum(axis=(1, 2)))
        self._kernel_cache[key] = out
        return out


def _interferer_pulse(kind, filt):
    """Baseband single-subcarrier pulse, its symbol period and symbol variance
    such that the transmitted stream has unit average power per sample."""
    N = filt.fft_size
    if kind.kind is WaveformType.OFDM:
        n_cp = int(round(kind.cp_ratio * N))
        pulse = np.ones(N + n_cp, dtype=complex)
        return pulse, N + n_cp, 1.0
    h = filt.impulse_response
    period = N // 2
    # real OQAM symbols at twice the rate; unit stream power
    var = period / float(np.sum(h * h))
    return h.astype(complex), period, var


def _victim_bank(kind, filt, offsets):
    """Analysis windows at the requested spectral offsets plus the victim's
    output period, timing-offset span, real-part factor and useful power."""
    N = filt.fft_size
    ls = np.asarray(offsets)
    if kind.kind is WaveformType.OFDM:
        n_cp = int(round(kind.cp_ratio * N))
        n = np.arange(N)
        win = np.exp(2j * np.pi * ls[:, None] * n[None, :] / N)
        useful = float(N) ** 2
        return win, N + n_cp, N + n_cp, 1.0, useful
    h = filt.impulse_response
    n = np.arange(h.size)
    win = h[None, :] * np.exp(2j * np.pi * ls[:, None] * n[None, :] / N)
    e_h = float(np.sum(h * h))
    # coherent OQAM gain e_h at symbol variance (N/2)/e_h
    useful = (N / 2.0) * e_h ** 2
    return win, N // 2, N, 0.5, useful


def _xcorr_energy(pulse, windows):
    """|cross-correlation|^2 of the pulse against each analysis window.

    Entry ``[i, k]`` is ``|sum_u pulse[u] conj(win_i[u + lag])|^2`` with
    ``lag = len(win) - 1 - k``.
    """
    q = np.conj(windows)[:, ::-1]
    c = fftconvolve(pulse[None, :], q, axes=-1)
    return np.abs(c) ** 2


def table_from_time_sim(interferer, victim, filt, half_span,
                        num_offsets, seed, freq_offset=False,
                        num_victim_symbols=16, timing_offsets=None):
    """Offset-averaged leakage table from a time-domain receiver model.

    One interferer subcarrier transmits an endless stream of unit-power random
    symbols; the victim demodulator is applied at spectral offsets
    ``l in [-half_span, half_span]`` under timing offsets drawn uniformly over
    one victim symbol duration (integer-sample resolution).  The expectation
    over the random symbols and over the interferer's carrier phase is taken
    in closed form, so only the offsets are sampled.  Deterministic for a
    given seed.

    ``freq_offset=True`` additionally draws a carrier frequency offset
    uniformly within +/- half the subcarrier spacing for every offset sample.
    ``timing_offsets`` forces an explicit list of timing offsets (in samples)
    instead of random draws; used for calibration tests.
    """
    if half_span < 1:
        raise ValueError("half_span must be >= 1")
    if timing_offsets is None and num_offsets < 100:
        raise ValueError("num_offsets must be >= 100")
    N = filt.fft_size
    pulse, t_int, var_int = _interferer_pulse(interferer, filt)
    ls = np.arange(0, half_span + 1)
    win, t_vic, tau_span, re_factor, useful = _victim_bank(victim, filt, ls)
    n_win = win.shape[1]

    rng = np.random.default_rng(seed)
    if timing_offsets is not None:
        taus = np.asarray(timing_offsets, dtype=int)
    else:
        taus = rng.integers(0, tau_span, size=num_offsets)
    if freq_offset:
        eps = rng.uniform(-0.5, 0.5, size=taus.size)
    else:
        eps = np.zeros(taus.size)

    V = num_victim_symbols
    v = np.arange(V)
    s_lo = int(np.floor(-(pulse.size - 1 + tau_span) / t_int)) - 1
    s_hi = int(np.ceil((n_win - 1 + tau_span + V * t_vic) / t_int)) + 1
    s = np.arange(s_lo, s_hi + 1)

    energy = None
    if not freq_offset:
        energy = _xcorr_energy(pulse, win)

    acc = np.zeros(half_span + 1)
    u = np.arange(pulse.size)
    for tau, ep in zip(taus, eps):
        e = energy
        if e is None:
            e = _xcorr_energy(pulse * np.exp(2j * np.pi * ep * u / N), win)
        lags = s[None, :] * t_int - int(tau) - v[:, None] * t_vic
        k = n_win - 1 - lags
        valid = (k >= 0) & (k < e.shape[1])
        idx = np.where(valid, k, 0)
        vals = e[:, idx.ravel()].reshape(ls.size, *idx.shape) * valid[None]
        acc += vals.sum(axis=(1, 2)) / V
    acc *= re_factor * var_int / (useful * taus.size)

    coeffs = {0: float(acc[0])}
    for l in range(1, half_span + 1):
        coeffs[l] = coeffs[-l] = float(acc[l])
    return InterferenceTable(interferer=interferer, victim=victim,
                             half_span=half_span, coeffs=coeffs,
                             reference_power=1.0, method=TIME_SIM).validate()


def table_from_psd(interferer, victim, filt, half_span, pad_factor=64):
    """Leakage table from band-integration of the interferer's PSD.

    The per-subcarrier PSD is |FFT of the symbol pulse|^2 on a fine grid;
    I(l) integrates it over the victim subcarrier band at offset l, with the
    whole PSD normalised to ``reference_power`` = 1.  The victim's receive
    filtering is deliberately ignored (this is the approximate baseline).
    """
    if half_span < 1:
        raise ValueError("half_span must be >= 1")
    N = filt.fft_size
    if interferer.kind is WaveformType.OFDM:
        pulse = np.ones(N + int(round(interferer.cp_ratio * N)))
    else:
        pulse = filt.impulse_response
    m = pad_factor * N
    psd = np.abs(np.fft.fft(pulse, m)) ** 2
    f = np.fft.fftfreq(m) * N    # frequency in subcarrier spacings
    total = psd.sum()
    coeffs = {}
    for l in range(0, half_span + 1):
        band = (f > l - 0.5) & (f <= l + 0.5)
        val = float(psd[band].sum() / total)
        coeffs[l] = coeffs[-l] = val
    return InterferenceTable(interferer=interferer, victim=victim,
                             half_span=half_span, coeffs=coeffs,
                             reference_power=1.0, method=PSD).validate()


def build_all_tables(filt, method=TIME_SIM, half_span=DEFAULT_HALF_SPAN,
                     num_offsets=400, seed=0, freq_offset=False):
    """All four (interferer, victim) pairings, keyed by WaveformType pairs."""
    kinds = (OFDM, FBMC)
    tables = {}
    for i, a in enumerate(kinds):
        for j, b in enumerate(kinds):
            if method == PSD:
                t = table_from_psd(a, b, filt, half_span)
            else:
                t = table_from_time_sim(a, b, filt, half_span, num_offsets,
                                        seed + 7 * i + j, freq_offset=freq_offset)
            tables[(a.kind, b.kind)] = t
    return tables


# ---------------------------------------------------------------------------
# CSV persistence
# ---------------------------------------------------------------------------

def save_table(table, path):
    """Write a table as CSV: one header line, then ``l,value`` rows."""
    table.validate()
    lines = ["# %s,%s,%s,%d,%s" % (table.interferer.name, table.victim.name,
                                   table.method, table.half_span,
                                   "%.17g" % table.reference_power)]
    for l in range(-table.half_span, table.half_span + 1):
        lines.append("%d,%.17g" % (l, table.coeffs[l]))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_kind(token, line):
    try:
        return {"OFDM": OFDM, "FBMC_OQAM": FBMC}[token]
    except KeyError:
        raise TableFormatError("unknown waveform %r" % token, line, 1)


def load_table(path):
    """Parse a table CSV written by :func:`save_table` and validate it."""
    with open(path) as fh:
        raw = fh.read().splitlines()
    if not raw or not raw[0].startswith("#"):
        raise TableFormatError("missing header line", 1, 1)
    head = [t.strip() for t in raw[0].lstrip("#").split(",")]
    if len(head) != 5:
        raise TableFormatError("header needs 5 comma-separated fields", 1, 1)
    interferer = _parse_kind(head[0], 1)
    victim = _parse_kind(head[1], 1)
    if head[2] not in (PSD, TIME_SIM):
        raise TableFormatError("unknown method %r" % head[2], 1, 3)
    try:
        half_span = int(head[3])
        ref_power = float(head[4])
    except ValueError as exc:
        raise TableFormatError(str(exc), 1, 4)
    coeffs = {}
    for ln, row in enumerate(raw[1:], start=2):
        if not row.strip():
            continue
        parts = row.split(",")
        if len(parts) != 2:
            raise TableFormatError("expected 'l,value'", ln, 1)
        try:
            l = int(parts[0])
        except ValueError:
            raise TableFormatError("bad spectral distance %r" % parts[0], ln, 1)
        try:
            val = float(parts[1])
        except ValueError:
            raise TableFormatError("bad coefficient %r" % parts[1], ln,
                                   len(parts[0]) + 2)
        if l in coeffs:
            raise TableFormatError("duplicate entry for l=%d" % l, ln, 1)
        coeffs[l] = val
    table = InterferenceTable(interferer=interferer, victim=victim,
                              half_span=half_span, coeffs=coeffs,
                              reference_power=ref_power, method=head[2])
    return table.validate()
