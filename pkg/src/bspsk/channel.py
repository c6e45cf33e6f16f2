"""Tapped-delay-line fading channel, AWGN injection and the analytic transfer function.

Random draws come from Philox streams keyed by ``(seed, trial, tap)`` or by
the caller's key tuple, so every realization is reproducible on its own and
independent of the order trials run in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import hilbert

from . import kernels
from .errors import ConfigError, DomainError
from .signal import FrequencyGrid, SampledSignal

_DELAY_TOL = 1e-6  # in samples


def rng_stream(*key) -> np.random.Generator:
    """Counter-based generator keyed by a tuple of non-negative integers."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(k) for k in key])))


@dataclass(frozen=True)
class TapProfile:
    """Power-delay profile: tap delays (s) and mean powers (dB rel. first tap)."""

    delays: tuple
    powers_db: tuple

    def __post_init__(self):
        delays = tuple(float(d) for d in self.delays)
        powers = tuple(float(p) for p in self.powers_db)
        if not delays:
            raise ConfigError("a tap profile needs at least one tap")
        if len(delays) != len(powers):
            raise ConfigError("delays and powers_db differ in length")
        if delays[0] != 0.0:
            raise ConfigError(f"first tap delay must be 0, got {delays[0]}")
        if any(b <= a for a, b in zip(delays, delays[1:])):
            raise ConfigError("tap delays must be strictly increasing")
        if not all(math.isfinite(p) for p in powers):
            raise ConfigError("tap powers must be finite")
        object.__setattr__(self, "delays", delays)
        object.__setattr__(self, "powers_db", powers)

    @property
    def linear_powers(self):
        return np.power(10.0, np.asarray(self.powers_db) / 10.0)

    @property
    def max_delay(self):
        return self.delays[-1]

    def to_config(self):
        return [{"delay_s": d, "power_db": p} for d, p in zip(self.delays, self.powers_db)]

    @classmethod
    def from_config(cls, taps):
        return cls(tuple(t["delay_s"] for t in taps), tuple(t["power_db"] for t in taps))


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """One fixed draw of the tap gains, held for a coherence interval."""

    delays: np.ndarray
    gains: np.ndarray
    seed_record: dict = field(default_factory=dict)

    def __post_init__(self):
        delays = np.asarray(self.delays, dtype=np.float64)
        gains = np.asarray(self.gains, dtype=np.complex128)
        if delays.shape != gains.shape or delays.ndim != 1:
            raise ConfigError("delays and gains must be 1-D and equally long")
        if not np.all(np.isfinite(gains)):
            raise ConfigError("tap gains must be finite")
        object.__setattr__(self, "delays", delays)
        object.__setattr__(self, "gains", gains)

    @property
    def taps(self):
        return list(zip(self.delays.tolist(), self.gains.tolist()))

    def magnitude_only(self):
        """Same delays with real gains ``|g_k|``, for the real passband path."""
        return ChannelRealization(self.delays, np.abs(self.gains),
                                  {**self.seed_record, "magnitude_only": True})

    def __eq__(self, other):
        if not isinstance(other, ChannelRealization):
            return NotImplemented
        return (np.array_equal(self.delays, other.delays)
                and np.array_equal(self.gains, other.gains)
                and self.seed_record == other.seed_record)

    __hash__ = None


def draw_realization(profile: TapProfile, seed: int, mode: str = "rayleigh",
                     trial: int = 0) -> ChannelRealization:
    """Draw tap gains for one coherence interval.

    ``rayleigh``: circularly-symmetric complex Gaussian gains with the
    profile's mean powers. ``fixed``: real gains ``sqrt(power)``.
    """
    powers = profile.linear_powers
    if mode == "fixed":
        gains = np.sqrt(powers).astype(np.complex128)
    elif mode == "rayleigh":
        gains = np.empty(len(powers), dtype=np.complex128)
        for k, pw in enumerate(powers):
            z = rng_stream(seed, trial, k).standard_normal(2)
            gains[k] = math.sqrt(pw / 2.0) * complex(z[0], z[1])
    else:
        raise ConfigError(f"unknown channel mode {mode!r}")
    return ChannelRealization(np.asarray(profile.delays), gains,
                              {"seed": int(seed), "trial": int(trial), "mode": mode})


def transfer_function(ch: ChannelRealization, grid) -> np.ndarray:
    """``H(f) = sum_k g_k exp(-j 2 pi f tau_k)`` on a grid (or array of Hz)."""
    f = grid.frequencies() if isinstance(grid, FrequencyGrid) else np.asarray(grid, dtype=float)
    return np.exp(-2j * np.pi * np.outer(f, ch.delays)) @ ch.gains


def delay_samples(ch: ChannelRealization, sample_rate: float) -> np.ndarray:
    d = ch.delays * sample_rate
    bad = np.abs(d - np.round(d)) > _DELAY_TOL
    if np.any(bad):
        tau = float(ch.delays[bad][0])
        raise ConfigError(f"tap delay {tau:g} s is not on the {sample_rate:g} Hz sample grid; "
                          f"use a sample rate that is a multiple of {1.0 / tau:g} Hz")
    return np.round(d).astype(np.int64)


def apply_channel(s: SampledSignal, ch: ChannelRealization, *, complex_gains=None) -> SampledSignal:
    """Pass ``s`` through the tapped delay line; output is ``max_delay`` samples longer.

    Real gains are applied directly. Complex gains on a real passband signal
    are applied through its analytic signal, ``y = Re(sum_k g_k x_a[n - d_k])``,
    which rotates the carrier phase of each path by ``arg(g_k)``. Pass
    ``complex_gains=False`` to force the real path (gains then must be real).
    """
    d = delay_samples(ch, s.sample_rate)
    gains = ch.gains
    has_phase = bool(np.any(gains.imag != 0.0))
    if complex_gains is None:
        complex_gains = has_phase
    if s.is_complex:
        y = kernels.tapped_delay(s.samples, d, gains)
    elif complex_gains:
        xa = hilbert(s.samples)
        y = np.real(kernels.tapped_delay(xa, d, gains))
    else:
        if has_phase:
            raise ConfigError("complex tap gains on the real path; use magnitude_only() "
                              "or complex_gains=True")
        y = kernels.tapped_delay(s.samples, d, gains.real)
    return SampledSignal(y, s.sample_rate, s.t0)


def signal_power(s: SampledSignal) -> float:
    return float(np.mean(np.abs(s.samples) ** 2))


def add_awgn(s: SampledSignal, snr_db: float | None, seed) -> SampledSignal:
    """Add white Gaussian noise at ``snr_db`` below the measured signal power.

    ``snr_db`` of ``None`` or ``+inf`` returns the input unchanged. ``seed`` is
    an int or a tuple of ints naming the noise stream. Complex signals get
    circular noise with the same total variance.
    """
    if snr_db is None or snr_db == math.inf:
        return s
    power = signal_power(s)
    if power <= 0.0:
        raise DomainError("cannot set an SNR on a zero-power signal")
    var = power / 10.0 ** (snr_db / 10.0)
    key = seed if isinstance(seed, (tuple, list)) else (seed,)
    rng = rng_stream(*key)
    n = len(s)
    if s.is_complex:
        noise = math.sqrt(var / 2.0) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    else:
        noise = math.sqrt(var) * rng.standard_normal(n)
    return s.with_samples(s.samples + noise)
