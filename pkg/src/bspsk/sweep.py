"""Sawtooth-FM sweeping carrier, its orthonormal basis pair and the M-PSK modulator.

Time convention: sweep ``j`` occupies ``[j*T_c - T_c/2, j*T_c + T_c/2)``, i.e.
the ramp is centred on the carrier frequency and runs through zero at
``t = j*T_c``. Symbol slot ``k`` of a sweep starts ``k*T_s`` after the sweep
start. All waveforms are real passband.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError, FramingError
from .signal import SampledSignal

#: passband oversampling factor over the highest swept frequency
OVERSAMPLING = 8.0

_ALIGN_TOL = 1e-6


@dataclass(frozen=True)
class SweepParams:
    """Carrier and ramp constants of the sweeping carrier.

    omega_c is in rad/s, K in ramp units per second, K_f in rad/s per ramp
    unit and T_c (the sweep period, equal to the coherence time) in seconds.
    """

    omega_c: float
    K: float
    K_f: float
    T_c: float

    def __post_init__(self):
        for name in ("omega_c", "K", "K_f", "T_c"):
            val = getattr(self, name)
            if not math.isfinite(val):
                raise ConfigError(f"{name} must be finite, got {val}")
            object.__setattr__(self, name, float(val))
        if self.omega_c <= 0 or self.K <= 0 or self.T_c <= 0:
            raise ConfigError("omega_c, K and T_c must be positive")
        # K_f = 0 is allowed: it is the unswept (plain PSK) limit.
        if self.K_f < 0:
            raise ConfigError(f"K_f must be non-negative, got {self.K_f}")
        if self.omega_c - 0.5 * self.bandwidth <= 0:
            raise ConfigError(
                f"swept band reaches non-positive frequency: omega_c={self.omega_c:g} rad/s, "
                f"B/2={0.5 * self.bandwidth:g} rad/s")

    @property
    def f_c(self):
        return self.omega_c / (2.0 * math.pi)

    @property
    def bandwidth(self):
        """Swept bandwidth B = K_f*K*T_c in rad/s."""
        return self.K_f * self.K * self.T_c

    @property
    def bandwidth_hz(self):
        return self.bandwidth / (2.0 * math.pi)

    @property
    def sweep_rate(self):
        """Rate of change of instantaneous angular frequency, rad/s^2."""
        return self.K_f * self.K

    @property
    def f_min(self):
        return (self.omega_c - 0.5 * self.bandwidth) / (2.0 * math.pi)

    @property
    def f_max(self):
        return (self.omega_c + 0.5 * self.bandwidth) / (2.0 * math.pi)

    @classmethod
    def from_band(cls, f_c, bandwidth_hz, T_c, K=1.0):
        """Solve ``K_f*K*T_c = 2*pi*bandwidth_hz`` for K_f at the given K."""
        return cls(2.0 * math.pi * f_c, K, 2.0 * math.pi * bandwidth_hz / (K * T_c), T_c)


@dataclass(frozen=True)
class ModulationParams:
    """M-PSK order, symbol duration (s), symbol energy and symbols per sweep."""

    M: int
    T_s: float
    E_s: float
    m: int

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 2 or (int(self.M) & (int(self.M) - 1)):
            raise ConfigError(f"M must be a power of two >= 2, got {self.M}")
        if int(self.m) != self.m or self.m < 1:
            raise ConfigError(f"m must be a positive integer, got {self.m}")
        if not (self.T_s > 0 and math.isfinite(self.T_s)):
            raise ConfigError(f"T_s must be positive, got {self.T_s}")
        if not (self.E_s > 0 and math.isfinite(self.E_s)):
            raise ConfigError(f"E_s must be positive, got {self.E_s}")
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "T_s", float(self.T_s))
        object.__setattr__(self, "E_s", float(self.E_s))

    @property
    def bits_per_symbol(self):
        return int(self.M).bit_length() - 1

    @property
    def amplitude(self):
        """Passband envelope sqrt(2*E_s/T_s)."""
        return math.sqrt(2.0 * self.E_s / self.T_s)


def check_compatible(p: SweepParams, mp: ModulationParams, *, allow_fractional_cycles=False):
    """Raise ConfigError unless ``T_c = m*T_s`` and ``T_s`` holds whole carrier cycles."""
    if not math.isclose(p.T_c, mp.m * mp.T_s, rel_tol=1e-9):
        raise ConfigError(f"T_c={p.T_c:g} s differs from m*T_s={mp.m * mp.T_s:g} s")
    cycles = p.f_c * mp.T_s
    if not allow_fractional_cycles and abs(cycles - round(cycles)) > 1e-6 * max(1.0, cycles):
        raise ConfigError(f"T_s holds {cycles:.6f} carrier cycles; an integer is required")


def required_sample_rate(p: SweepParams) -> float:
    return OVERSAMPLING * p.f_max


def check_sample_rate(p: SweepParams, sample_rate: float):
    need = required_sample_rate(p)
    if sample_rate < need * (1.0 - 1e-12):
        raise ConfigError(f"sample_rate {sample_rate:g} Hz below required {need:g} Hz "
                          f"({OVERSAMPLING:g}x the top swept frequency)")


def samples_per(duration: float, sample_rate: float, what: str) -> int:
    """Whole number of samples in ``duration``; ConfigError if not grid-aligned."""
    n = duration * sample_rate
    if abs(n - round(n)) > _ALIGN_TOL * max(1.0, n) or round(n) < 1:
        raise ConfigError(f"{what} of {duration:g} s is {n:.6f} samples at {sample_rate:g} Hz; "
                          "it must be a whole number")
    return int(round(n))


def wrapped_time(t, p: SweepParams):
    """Map ``t`` into the sweep period ``[-T_c/2, T_c/2)``."""
    half = 0.5 * p.T_c
    return np.mod(np.asarray(t, dtype=np.float64) + half, p.T_c) - half


def sawtooth(t, p: SweepParams):
    """Periodic ramp ``K*t'`` with ``t'`` the wrapped time."""
    out = p.K * wrapped_time(t, p)
    return float(out) if np.ndim(out) == 0 else out


def sweep_phase(t, p: SweepParams):
    """Instantaneous phase ``omega_c*t + K_f * integral(ramp)`` in closed form.

    The ramp integral starts at zero at the beginning of each period and
    returns to zero at its end, so the phase is continuous across sweeps.
    """
    arr = np.asarray(t, dtype=np.float64)
    if arr.ndim == 0:
        return float(kernels.numpy_impl.sweep_phase(arr, p.omega_c, p.K, p.K_f, p.T_c))
    return kernels.sweep_phase(arr, p.omega_c, p.K, p.K_f, p.T_c)


def instantaneous_frequency(t, p: SweepParams):
    """Instantaneous angular frequency in rad/s (piecewise linear, T_c-periodic)."""
    out = p.omega_c + p.sweep_rate * wrapped_time(t, p)
    return float(out) if np.ndim(out) == 0 else out


def sweep_bandwidth(p: SweepParams) -> float:
    return p.bandwidth


def slot_start(p: SweepParams, mp: ModulationParams, symbol_index: int, sweep_index: int = 0):
    return sweep_index * p.T_c - 0.5 * p.T_c + symbol_index * mp.T_s


def slot_center_frequency(p: SweepParams, mp: ModulationParams, symbol_index):
    """Instantaneous frequency (Hz) at the middle of slot ``symbol_index mod m``."""
    k = np.asarray(symbol_index) % mp.m
    t_mid = -0.5 * p.T_c + (k + 0.5) * mp.T_s
    return (p.omega_c + p.sweep_rate * t_mid) / (2.0 * math.pi)


def basis_pair(p: SweepParams, mp: ModulationParams, symbol_index: int, sample_rate: float,
               *, sweep_index: int = 0):
    """In-phase and quadrature sweeping basis functions over one symbol slot."""
    check_sample_rate(p, sample_rate)
    if not 0 <= symbol_index < mp.m:
        raise ConfigError(f"symbol_index {symbol_index} outside 0..{mp.m - 1}")
    n = samples_per(mp.T_s, sample_rate, "symbol duration")
    t0 = slot_start(p, mp, symbol_index, sweep_index)
    theta = sweep_phase(t0 + np.arange(n) / sample_rate, p)
    a = math.sqrt(2.0 / mp.T_s)
    return (SampledSignal(a * np.cos(theta), sample_rate, t0),
            SampledSignal(a * np.sin(theta), sample_rate, t0))


def _gray(k):
    return k ^ (k >> 1)


def constellation(mp: ModulationParams):
    """Constellation points and their bit labels.

    Point ``k`` sits at angle ``2*pi*k/M`` on the circle of radius sqrt(E_s);
    its label is the bit-complemented Gray code of ``k``, so neighbours differ
    in one bit and for BPSK bit 1 maps to +sqrt(E_s).

    Returns ``(points, labels)`` with ``points`` shaped (M, 2).
    """
    k = np.arange(mp.M)
    ang = 2.0 * np.pi * k / mp.M
    r = math.sqrt(mp.E_s)
    points = np.column_stack([r * np.cos(ang), r * np.sin(ang)])
    if mp.M == 2:
        points[:, 1] = 0.0
    labels = _gray(k) ^ (mp.M - 1)
    return points, labels


def bits_to_labels(bits, bits_per_symbol):
    bits = np.asarray(bits, dtype=np.int64).ravel()
    if bits.size % bits_per_symbol:
        raise FramingError(f"{bits.size} bits do not divide into {bits_per_symbol}-bit symbols")
    if bits.size and (bits.min() < 0 or bits.max() > 1):
        raise FramingError("bits must be 0 or 1")
    weights = 1 << np.arange(bits_per_symbol - 1, -1, -1)
    return bits.reshape(-1, bits_per_symbol) @ weights


def labels_to_bits(labels, bits_per_symbol):
    labels = np.asarray(labels, dtype=np.int64)
    shifts = np.arange(bits_per_symbol - 1, -1, -1)
    return ((labels[:, None] >> shifts) & 1).ravel()


def mpsk_map(bits, mp: ModulationParams) -> np.ndarray:
    """Gray-mapped M-PSK symbols as an (n, 2) array of (i, q) projections."""
    labels = bits_to_labels(bits, mp.bits_per_symbol)
    points, point_labels = constellation(mp)
    index_of_label = np.empty(mp.M, dtype=np.int64)
    index_of_label[point_labels] = np.arange(mp.M)
    return points[index_of_label[labels]]


def carrier(p: SweepParams, n_sweeps: int, sample_rate: float, amplitude: float = 1.0,
            *, sweep_offset: int = 0) -> SampledSignal:
    """Unmodulated sweeping carrier over ``n_sweeps`` whole sweeps."""
    check_sample_rate(p, sample_rate)
    n = samples_per(p.T_c, sample_rate, "sweep period") * n_sweeps
    t0 = sweep_offset * p.T_c - 0.5 * p.T_c
    theta = sweep_phase(t0 + np.arange(n) / sample_rate, p)
    return SampledSignal(amplitude * np.cos(theta), sample_rate, t0)


def modulate(bits, p: SweepParams, mp: ModulationParams, n_sweeps: int, sample_rate: float,
             *, allow_fractional_cycles=False, sweep_offset: int = 0) -> SampledSignal:
    """BS-M-PSK transmit waveform for ``n_sweeps`` sweeps.

    Consumes the first ``n_sweeps*m*log2(M)`` bits; fewer bits is a
    FramingError. Symbol ``k`` is ``i_k*phi_i + q_k*phi_q`` on its slot, with
    hard phase switches between slots.
    """
    check_compatible(p, mp, allow_fractional_cycles=allow_fractional_cycles)
    check_sample_rate(p, sample_rate)
    n_sym = n_sweeps * mp.m
    need = n_sym * mp.bits_per_symbol
    bits = np.asarray(bits).ravel()
    if bits.size < need:
        raise FramingError(f"{n_sweeps} sweeps need {need} bits, got {bits.size}")
    iq = mpsk_map(bits[:need], mp)
    n_per = samples_per(mp.T_s, sample_rate, "symbol duration")
    t0 = sweep_offset * p.T_c - 0.5 * p.T_c
    theta = sweep_phase(t0 + np.arange(n_sym * n_per) / sample_rate, p)
    a = math.sqrt(2.0 / mp.T_s)
    i_t = np.repeat(iq[:, 0], n_per)
    q_t = np.repeat(iq[:, 1], n_per)
    return SampledSignal(a * (i_t * np.cos(theta) + q_t * np.sin(theta)), sample_rate, t0)
