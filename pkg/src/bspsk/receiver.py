"""Receiver: envelope-detector channel estimator, tap extraction, ZF equalizer,
correlator and slicer.

The estimator never sees a pilot. Because the carrier sweeps linearly, the
received envelope at time ``t`` is the channel gain at the instantaneous
frequency ``f(t)``; rectifying, low-pass filtering and re-labelling the time
axis as a frequency axis gives ``|H(f)|`` across the swept band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import firwin, oaconvolve

from . import kernels
from .channel import ChannelRealization, transfer_function
from .errors import ConfigError, FramingError, InsufficientDataError
from .signal import FrequencyGrid, SampledSignal
from .sweep import (ModulationParams, SweepParams, constellation, labels_to_bits,
                    samples_per, slot_center_frequency)

#: required ratio between carrier, envelope-filter cutoff and channel ripple rate
SEPARATION_MARGIN = 10.0
#: ZF gains are clamped at this fraction of the largest estimated gain
ZF_FLOOR = 0.05
#: symbol-boundary masks may claim at most this fraction of each symbol
_MAX_MASKED_FRACTION = 0.4


@dataclass(eq=False)
class TransferEstimate:
    """Estimated channel gain across the swept band.

    ``phase`` is only set for genie (true-channel) estimates; envelope
    detection recovers magnitude alone.
    """

    grid: FrequencyGrid
    magnitude: np.ndarray
    valid_mask: np.ndarray
    norm_factor: float = 1.0
    phase: np.ndarray | None = None

    def __post_init__(self):
        self.magnitude = np.asarray(self.magnitude, dtype=np.float64)
        self.valid_mask = np.asarray(self.valid_mask, dtype=bool)
        if self.magnitude.shape != (self.grid.n_points,) or self.valid_mask.shape != self.magnitude.shape:
            raise ConfigError("magnitude and valid_mask must match the grid")

    @property
    def frequencies(self):
        return self.grid.frequencies()

    @property
    def valid_fraction(self):
        return float(np.mean(self.valid_mask))

    def filled(self):
        """Magnitude with invalid points replaced by linear interpolation."""
        if self.valid_mask.all():
            return self.magnitude.copy()
        idx = np.flatnonzero(self.valid_mask)
        if idx.size < 2:
            raise InsufficientDataError("fewer than two valid points")
        k = np.arange(self.magnitude.size)
        return np.interp(k, idx, self.magnitude[idx])

    def at(self, freqs):
        """Filled magnitude linearly interpolated at ``freqs`` (Hz)."""
        return np.interp(freqs, self.frequencies, self.filled())


@dataclass(eq=False)
class TapEstimate:
    """Delay-domain view of a magnitude estimate.

    ``gains`` are one-sided amplitudes: the inverse DFT of a real magnitude is
    conjugate-symmetric, so the ``+k`` and ``-k`` bins are folded together.
    ``power`` folds the squared bins instead and sums to ``mean(|H|^2)``.
    """

    delays: np.ndarray
    gains: np.ndarray
    power: np.ndarray

    def dominant(self, n):
        """Delays of the ``n`` largest taps, ascending."""
        idx = np.argsort(self.gains)[::-1][:n]
        return np.sort(self.delays[idx])


# -- envelope detection ------------------------------------------------------

def envelope_rate(p: SweepParams, max_delay: float = 0.0) -> float:
    """Fastest envelope variation (Hz) from a delay spread of ``max_delay``.

    The gain ripples in frequency with period ``1/max_delay``; the sweep
    traverses ``B_Hz*max_delay`` ripples per sweep. At least one variation per
    sweep is assumed so a flat channel still gets a finite cutoff.
    """
    return max(p.bandwidth_hz * max_delay, 1.0) / p.T_c


def envelope_cutoff(p: SweepParams, max_delay: float = 0.0) -> float:
    """Geometric mean of the lowest carrier frequency and the envelope rate."""
    return math.sqrt(p.f_min * envelope_rate(p, max_delay))


def separation_margin(p: SweepParams, max_delay: float = 0.0) -> float:
    """Smaller of ``f_min/cutoff`` and ``cutoff/rate``; both equal by construction."""
    fc = envelope_cutoff(p, max_delay)
    return min(p.f_min / fc, fc / envelope_rate(p, max_delay))


def _odd(n):
    n = int(math.ceil(n))
    return n if n % 2 else n + 1


def envelope_filter_taps(sample_rate: float, cutoff_hz: float, max_taps: int | None = None) -> int:
    n = _odd(sample_rate / cutoff_hz)
    if max_taps is not None:
        n = min(n, max_taps if max_taps % 2 else max_taps - 1)
    if n < 3:
        raise ConfigError(f"envelope filter would have {n} taps; increase the sample rate")
    return n


def envelope_detect(s: SampledSignal, p: SweepParams | None = None, *, cutoff_hz=None,
                    n_taps=None, max_delay: float = 0.0) -> SampledSignal:
    """Full-wave rectify, low-pass filter forward and backward, rescale by pi/2.

    The filter is a Hamming-windowed sinc with unit DC gain. Applying the
    symmetric filter in 'same' mode twice leaves zero group delay, so output
    sample ``n`` lines up with input sample ``n``. The cutoff defaults to
    :func:`envelope_cutoff` of ``p``.
    """
    if cutoff_hz is None:
        if p is None:
            raise ConfigError("need sweep parameters or an explicit cutoff")
        cutoff_hz = envelope_cutoff(p, max_delay)
    if cutoff_hz >= 0.5 * s.sample_rate:
        raise ConfigError(f"cutoff {cutoff_hz:g} Hz is not below Nyquist")
    if n_taps is None:
        n_taps = envelope_filter_taps(s.sample_rate, cutoff_hz)
    if len(s) < n_taps:
        raise InsufficientDataError(f"{len(s)} samples is shorter than the {n_taps}-tap filter")
    h = firwin(n_taps, cutoff_hz, window="hamming", fs=s.sample_rate)
    rect = np.abs(s.samples)
    env = oaconvolve(oaconvolve(rect, h, mode="same"), h, mode="same")
    return s.with_samples(0.5 * np.pi * env)


def transient_intervals(p: SweepParams, sample_rate: float, n_taps: int,
                        mp: ModulationParams | None = None, max_delay: float = 0.0) -> list:
    """Time intervals (s, relative to sweep start) to drop from the envelope.

    Each sweep edge loses two filter group delays; with ``mp`` given, so does
    each side of every symbol boundary. ``max_delay`` extends each interval
    forward for the echo of the discontinuity.
    """
    guard = (n_taps - 1) / sample_rate  # two group delays of the single-pass filter
    out = [(0.0, guard + max_delay), (p.T_c - guard, p.T_c)]
    if mp is not None:
        for k in range(1, mp.m):
            b = k * mp.T_s
            out.append((b - guard, b + guard + max_delay))
    return out


def _band_grid(p: SweepParams, n_points: int) -> FrequencyGrid:
    if p.bandwidth_hz <= 0:
        raise ConfigError("an unswept carrier (K_f = 0) cannot sound the channel")
    return FrequencyGrid(p.f_min, p.bandwidth_hz / n_points, n_points)


def envelope_to_transfer(env: SampledSignal, p: SweepParams, transient_mask=(), *,
                         amplitude: float = 1.0, n_points: int = 1024) -> TransferEstimate:
    """Relabel one sweep of envelope as gain versus instantaneous frequency.

    ``env`` must hold exactly one sweep starting at the sweep's first sample.
    Sample ``n`` sits at wrapped time ``-T_c/2 + n/fs`` and hence at frequency
    ``(omega_c + K_f*K*t')/2pi``; the grid spans ``[f_min, f_max)`` in
    ``n_points`` equal steps. Dividing by ``amplitude`` (the known transmit
    envelope) yields ``|H|``; that divisor is kept as ``norm_factor``.
    """
    n = len(env)
    need = samples_per(p.T_c, env.sample_rate, "sweep period")
    if n != need:
        raise FramingError(f"envelope holds {n} samples, one sweep is {need}")
    grid = _band_grid(p, n_points)
    fs = env.sample_rate
    t_rel = (2.0 * np.pi * grid.frequencies() - p.omega_c) / p.sweep_rate + 0.5 * p.T_c
    pos = t_rel * fs
    mag = np.interp(pos, np.arange(n), env.samples) / amplitude

    sample_ok = np.ones(n, dtype=bool)
    for start, stop in transient_mask:
        lo = max(int(math.floor(start * fs)), 0)
        hi = min(int(math.ceil(stop * fs)), n)
        if hi > lo:
            sample_ok[lo:hi] = False
    nearest = np.clip(np.round(pos).astype(np.int64), 0, n - 1)
    valid = sample_ok[nearest] & (pos >= 0) & (pos <= n - 1)
    est = TransferEstimate(grid, np.maximum(mag, 0.0), valid, float(amplitude))
    if est.valid_fraction < 0.5:
        raise InsufficientDataError(f"only {100 * est.valid_fraction:.1f}% of the band is "
                                    "unmasked; at least 50% is required")
    return est


def estimate_transfer(rx: SampledSignal, p: SweepParams, *, amplitude: float,
                      mp: ModulationParams | None = None, max_delay: float = 0.0,
                      n_points: int = 1024) -> TransferEstimate:
    """Envelope-detector estimate from one received sweep.

    Pass ``mp`` when the sweep carries data: symbol boundaries are then masked
    and the filter is shortened so the masks leave most of each symbol.
    """
    cutoff = envelope_cutoff(p, max_delay)
    max_taps = None
    if mp is not None:
        room = _MAX_MASKED_FRACTION * mp.T_s - max_delay
        if room <= 0:
            raise ConfigError("symbol too short to mask transients of this delay spread")
        max_taps = int(1 + rx.sample_rate * room / 2.0)
    n_taps = envelope_filter_taps(rx.sample_rate, cutoff, max_taps)
    env = envelope_detect(rx, cutoff_hz=cutoff, n_taps=n_taps)
    mask = transient_intervals(p, rx.sample_rate, n_taps, mp, max_delay)
    return envelope_to_transfer(env, p, mask, amplitude=amplitude, n_points=n_points)


def genie_transfer(ch: ChannelRealization, p: SweepParams, n_points: int = 1024) -> TransferEstimate:
    """True complex response of ``ch`` on the estimator's grid."""
    grid = _band_grid(p, n_points)
    H = transfer_function(ch, grid)
    return TransferEstimate(grid, np.abs(H), np.ones(n_points, dtype=bool), 1.0, np.angle(H))


def estimation_rms_error(h: TransferEstimate, true_magnitude) -> float:
    """RMS of ``estimate - truth`` over valid points, relative to peak truth."""
    true_magnitude = np.asarray(true_magnitude)
    err = h.magnitude[h.valid_mask] - true_magnitude[h.valid_mask]
    return float(np.sqrt(np.mean(err ** 2)) / np.max(np.abs(true_magnitude)))


# -- delay domain --------------------------------------------------------------

def estimate_taps(h: TransferEstimate) -> TapEstimate:
    """Inverse DFT of the (gap-filled) magnitude across the band.

    The delay grid spacing is one over the band span in Hz.
    """
    if h.valid_fraction < 0.5:
        raise InsufficientDataError("fewer than 50% valid points")
    mag = h.filled()
    n = mag.size
    a = np.abs(np.fft.ifft(mag))
    half = n // 2
    gains = np.empty(half + 1)
    power = np.empty(half + 1)
    gains[0], power[0] = a[0], a[0] ** 2
    k = np.arange(1, half + 1)
    mirror = n - k
    gains[1:] = a[k] + np.where(mirror != k, a[mirror], 0.0)
    power[1:] = a[k] ** 2 + np.where(mirror != k, a[mirror] ** 2, 0.0)
    delays = np.arange(half + 1) / h.grid.span
    return TapEstimate(delays, gains, power)


def dominant_ripple_period(h: TransferEstimate, pad: int = 64) -> float:
    """Frequency period (Hz) of the strongest ripple in the magnitude estimate.

    Hann-windowed, zero-padded DFT of the mean-removed magnitude with parabolic
    peak refinement. Without the window the mean removal and edge truncation
    pull the peak by about 1% even on an exact response.
    """
    x = h.filled()
    x = (x - x.mean()) * np.hanning(x.size)
    nfft = pad * x.size
    spec = np.abs(np.fft.rfft(x, nfft))
    spec[0] = 0.0
    k = int(np.argmax(spec[: nfft // 2]))
    if 0 < k < spec.size - 1:
        a, b, c = np.log(spec[k - 1:k + 2] + 1e-300)
        denom = a - 2 * b + c
        k = k + (0.5 * (a - c) / denom if denom != 0 else 0.0)
    delay = k / (nfft * h.grid.f_step)
    return 1.0 / delay


# -- data path -----------------------------------------------------------------

def correlate_demod(s: SampledSignal, p: SweepParams, mp: ModulationParams) -> np.ndarray:
    """Project each symbol slot onto the locally regenerated basis pair.

    ``s`` must start on a sweep boundary and hold a whole number of symbols.
    Returns an (n, 2) array of (i, q) projections.
    """
    n_per = samples_per(mp.T_s, s.sample_rate, "symbol duration")
    if len(s) % n_per:
        raise FramingError(f"{len(s)} samples is not a whole number of {n_per}-sample symbols")
    offset = (s.t0 + 0.5 * p.T_c) / p.T_c
    if abs(offset - round(offset)) * p.T_c * s.sample_rate > 1e-6:
        raise FramingError(f"signal starts at {s.t0:g} s, which is not a sweep boundary")
    theta = kernels.sweep_phase(s.times(), p.omega_c, p.K, p.K_f, p.T_c)
    a = math.sqrt(2.0 / mp.T_s) / s.sample_rate
    x = s.samples
    i = kernels.integrate_dump(x, np.cos(theta), n_per) * a
    q = kernels.integrate_dump(x, np.sin(theta), n_per) * a
    return np.column_stack([i, q])


def zf_equalize(proj, h: TransferEstimate, p: SweepParams, mp: ModulationParams,
                *, floor: float = ZF_FLOOR) -> np.ndarray:
    """Divide each projection by the channel gain at its slot-centre frequency.

    Gains below ``floor * max(gain)`` are clamped to that value. If ``h``
    carries a phase, the projection pair is de-rotated too: a path response
    ``H`` turns a transmitted ``i + jq`` into ``(i + jq) * conj(H)``.
    """
    proj = np.asarray(proj, dtype=np.float64)
    f = slot_center_frequency(p, mp, np.arange(proj.shape[0]))
    filled = h.filled()
    g = np.interp(f, h.frequencies, filled)
    g = np.maximum(g, floor * np.max(filled[h.valid_mask]))
    if h.phase is None:
        return proj / g[:, None]
    ph = np.interp(f, h.frequencies, np.unwrap(h.phase))
    z = (proj[:, 0] + 1j * proj[:, 1]) / (g * np.exp(-1j * ph))
    return np.column_stack([z.real, z.imag])


def slicer(proj, mp: ModulationParams) -> np.ndarray:
    """Nearest-point decisions, Gray-decoded to bits.

    Ties go to the lowest-index constellation point, so ``(0, 0)`` decodes
    as the label of the point at angle zero.
    """
    proj = np.asarray(proj, dtype=np.float64).reshape(-1, 2)
    points, labels = constellation(mp)
    idx = np.argmax(proj @ points.T, axis=1)
    return labels_to_bits(labels[idx], mp.bits_per_symbol)
