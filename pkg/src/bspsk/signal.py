"""Sampled-signal container and the numeric primitives shared by every module.

Integrals are rectangle-rule sums (``sum * dt``); the waveforms handled here
are oversampled by at least 8x, so nothing more elaborate is needed and the
inner product stays exactly bilinear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionError, InsufficientDataError, RangeError


@dataclass(frozen=True, eq=False)
class SampledSignal:
    """Uniformly sampled real or complex waveform.

    Attributes
    ----------
    samples : np.ndarray
        1-D array of amplitudes.
    sample_rate : float
        Samples per second (Hz).
    t0 : float
        Time of the first sample in seconds.
    """

    samples: np.ndarray
    sample_rate: float
    t0: float = 0.0

    def __post_init__(self):
        samples = np.asarray(self.samples)
        if samples.ndim != 1:
            raise DimensionError(f"samples must be 1-D, got shape {samples.shape}")
        if not np.issubdtype(samples.dtype, np.complexfloating):
            samples = samples.astype(np.float64, copy=False)
        if not (self.sample_rate > 0 and math.isfinite(self.sample_rate)):
            raise DimensionError(f"sample_rate must be positive, got {self.sample_rate}")
        if not np.all(np.isfinite(samples)):
            raise DimensionError("samples contain NaN or Inf")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", float(self.sample_rate))
        object.__setattr__(self, "t0", float(self.t0))

    def __len__(self):
        return self.samples.shape[0]

    @property
    def dt(self):
        return 1.0 / self.sample_rate

    @property
    def duration(self):
        return len(self) / self.sample_rate

    @property
    def is_complex(self):
        return np.iscomplexobj(self.samples)

    def times(self):
        """Sample instants in seconds."""
        return self.t0 + np.arange(len(self)) / self.sample_rate

    def with_samples(self, samples, t0=None):
        """Same time base, new amplitudes."""
        return SampledSignal(samples, self.sample_rate, self.t0 if t0 is None else t0)

    def slice(self, start, stop):
        """Sub-signal over sample indices ``[start, stop)`` with shifted ``t0``."""
        return SampledSignal(self.samples[start:stop], self.sample_rate,
                             self.t0 + start / self.sample_rate)

    def __eq__(self, other):
        if not isinstance(other, SampledSignal):
            return NotImplemented
        return (self.sample_rate == other.sample_rate and self.t0 == other.t0
                and np.array_equal(self.samples, other.samples))

    __hash__ = None


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform frequency axis ``f_start + k * f_step`` for ``k < n_points``."""

    f_start: float
    f_step: float
    n_points: int

    def __post_init__(self):
        if not self.f_step > 0:
            raise RangeError(f"f_step must be positive, got {self.f_step}")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise RangeError(f"n_points must be an integer >= 2, got {self.n_points}")
        object.__setattr__(self, "n_points", int(self.n_points))

    def frequencies(self):
        return self.f_start + self.f_step * np.arange(self.n_points)

    @property
    def span(self):
        return self.f_step * self.n_points

    @classmethod
    def from_frequencies(cls, freqs):
        """Grid through ``freqs``, which must be uniformly spaced and increasing."""
        freqs = np.asarray(freqs, dtype=np.float64)
        if freqs.size < 2:
            raise RangeError("need at least two frequencies")
        step = (freqs[-1] - freqs[0]) / (freqs.size - 1)
        if not np.allclose(np.diff(freqs), step, rtol=1e-9, atol=0.0):
            raise RangeError("frequencies are not uniformly spaced")
        return cls(float(freqs[0]), float(step), int(freqs.size))


def _check_same_base(a, b):
    if a.sample_rate != b.sample_rate:
        raise DimensionError(f"sample rates differ: {a.sample_rate} vs {b.sample_rate}")
    if len(a) != len(b):
        raise DimensionError(f"lengths differ: {len(a)} vs {len(b)}")
    if not math.isclose(a.t0, b.t0, rel_tol=1e-12, abs_tol=1e-6 / a.sample_rate):
        raise DimensionError(f"start times differ: {a.t0} vs {b.t0}")


def inner_product(a: SampledSignal, b: SampledSignal):
    """Rectangle-rule integral of ``a * conj(b)`` over the common support.

    Real inputs give a float; a complex input gives a complex result.
    """
    _check_same_base(a, b)
    if len(a) == 0:
        raise InsufficientDataError("inner product of empty signals")
    bb = np.conj(b.samples) if b.is_complex else b.samples
    val = np.dot(a.samples, bb) / a.sample_rate
    if np.iscomplexobj(val):
        return complex(val)
    return float(val)


def energy(s: SampledSignal) -> float:
    """Squared-norm integral of ``s``."""
    return float(np.real(inner_product(s, s)))


def dft_magnitude(s: SampledSignal, grid) -> np.ndarray:
    """Pointwise DTFT magnitude of ``s`` evaluated at each grid frequency.

    ``grid`` is a :class:`FrequencyGrid` or an array of frequencies in Hz.
    The result is normalized by the sample count, so a unit cosine with an
    integer number of cycles in the window reads 0.5 at its frequency.
    Frequencies at or beyond Nyquist raise :class:`RangeError`.
    """
    freqs = grid.frequencies() if isinstance(grid, FrequencyGrid) else np.atleast_1d(
        np.asarray(grid, dtype=np.float64))
    if len(s) == 0:
        raise InsufficientDataError("empty signal")
    nyq = 0.5 * s.sample_rate
    if np.any(np.abs(freqs) >= nyq):
        raise RangeError(f"grid reaches {np.abs(freqs).max():g} Hz, Nyquist is {nyq:g} Hz")
    w = 2.0 * np.pi * freqs / s.sample_rate
    return kernels.dtft_magnitude(s.samples, w)
