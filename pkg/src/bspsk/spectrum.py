"""Line spectrum of the sweeping carrier and numerical checks against it.

The analytic model keeps the first Fourier harmonic of the ramp and the
first-order term of the phase exponential (narrowband FM). That leaves six
lines: the carrier pair and one sideband pair either side, each at a
multiple of 1/T_c from the carrier.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import signal as sps

from .errors import ApproximationDomainError, DomainError
from .signal import SampledSignal, dft_magnitude
from .sweep import SweepParams, carrier, wrapped_time

#: largest modulation index for which the first-order expansion is accepted
NBFM_MAX_INDEX = 0.25


@dataclass(frozen=True)
class SpectrumLine:
    """One spectral line: frequency in Hz and complex two-sided coefficient."""

    frequency: float
    amplitude: complex


def sawtooth_fourier_coeff(n: int, p: SweepParams) -> complex:
    """Exponential Fourier coefficient of the ramp, ``j*K*T_c*(-1)^n / (2*pi*n)``."""
    if int(n) != n:
        raise DomainError(f"harmonic index must be an integer, got {n}")
    n = int(n)
    if n == 0:
        raise DomainError("the ramp is zero-mean; F_0 is not part of the series")
    sign = -1.0 if n % 2 else 1.0
    return 1j * p.K * p.T_c * sign / (2.0 * math.pi * n)


def fourier_coefficients(p: SweepParams, n_max: int) -> dict:
    """``{n: F_n}`` for ``0 < |n| <= n_max``."""
    return {n: sawtooth_fourier_coeff(n, p)
            for n in range(-n_max, n_max + 1) if n != 0}


def sawtooth_synthesis(t, p: SweepParams, n_terms: int):
    """Partial Fourier sum of the ramp over harmonics ``1 <= |n| <= n_terms``.

    Pairs ``(n, -n)`` are summed as ``2*Re(F_n e^{j n w t})``, which for this
    series is ``(K*T_c/pi) * (-1)^(n+1) * sin(n w t) / n``.
    """
    if n_terms < 1:
        raise DomainError(f"n_terms must be >= 1, got {n_terms}")
    t = np.asarray(t, dtype=np.float64)
    x = 2.0 * np.pi * t / p.T_c
    out = np.zeros_like(t)
    for n in range(1, n_terms + 1):
        out += (1.0 if n % 2 else -1.0) * np.sin(n * x) / n
    out *= p.K * p.T_c / np.pi
    return float(out) if out.ndim == 0 else out


def modulation_index(p: SweepParams) -> float:
    """``K_f*K*T_c^2 / (2*pi^2)``, the small parameter of the expansion."""
    return p.K_f * p.K * p.T_c ** 2 / (2.0 * math.pi ** 2)


def _check_nbfm(p, allow_wideband):
    mu = modulation_index(p)
    if p.f_c * p.T_c < 2.0:
        raise DomainError(f"f_c*T_c = {p.f_c * p.T_c:g}; the sidebands need f_c > 1/T_c")
    if mu > NBFM_MAX_INDEX:
        msg = f"modulation index {mu:.4g} exceeds the narrowband limit {NBFM_MAX_INDEX}"
        if not allow_wideband:
            raise ApproximationDomainError(msg)
        warnings.warn(msg, stacklevel=3)
    return mu


def nbfm_line_spectrum(p: SweepParams, *, allow_wideband=False) -> list:
    """Six-line narrowband spectrum of the carrier, sorted by frequency.

    Time-domain model: ``cos(w_c t) + mu sin(w_c t)
    + (mu/2) [sin((w_c + w_m) t) - sin((w_c - w_m) t)]`` with ``w_m = 2 pi/T_c``.
    The carrier coefficient is kept complex, ``(1 - j mu)/2`` at ``+f_c``.
    With ``mu = 0`` only the carrier pair is returned.
    """
    mu = _check_nbfm(p, allow_wideband)
    fc, fm = p.f_c, 1.0 / p.T_c
    lines = [SpectrumLine(fc, complex(0.5, -0.5 * mu)), SpectrumLine(-fc, complex(0.5, 0.5 * mu))]
    if mu > 0.0:
        # sin(2 pi f t) = (-j/2) e^{+} + (j/2) e^{-}
        side = 0.5 * mu
        lines += [
            SpectrumLine(fc + fm, -0.5j * side), SpectrumLine(-(fc + fm), 0.5j * side),
            SpectrumLine(fc - fm, 0.5j * side), SpectrumLine(-(fc - fm), -0.5j * side),
        ]
    return sorted(lines, key=lambda ln: ln.frequency)


@dataclass
class LineCheck:
    frequency_hz: float
    predicted: float
    measured: float
    rel_error: float | None
    level_db: float


@dataclass
class SpectrumReport:
    """Per-line comparison of the synthesized carrier against the analytic lines."""

    modulation_index: float
    n_periods: int
    sample_rate: float
    lines: list = field(default_factory=list)

    @property
    def max_rel_error(self):
        errs = [ln.rel_error for ln in self.lines if ln.rel_error is not None]
        return max(errs) if errs else 0.0

    def to_dict(self):
        return {"modulation_index": self.modulation_index, "n_periods": self.n_periods,
                "sample_rate": self.sample_rate, "max_rel_error": self.max_rel_error,
                "lines": [asdict(ln) for ln in self.lines]}

    @classmethod
    def from_dict(cls, d):
        return cls(d["modulation_index"], d["n_periods"], d["sample_rate"],
                   [LineCheck(**ln) for ln in d["lines"]])


def validate_spectrum(p: SweepParams, sample_rate: float, n_periods: int = 8,
                      *, allow_wideband=False) -> SpectrumReport:
    """Measure the synthesized carrier's DTFT at the six predicted line frequencies.

    Lines whose predicted amplitude is zero (K_f = 0) get ``rel_error=None``;
    their ``level_db`` relative to the measured carrier is the useful number.
    """
    if n_periods < 8:
        raise DomainError(f"n_periods must be >= 8, got {n_periods}")
    mu = _check_nbfm(p, allow_wideband)
    predicted = {round(ln.frequency, 9): abs(ln.amplitude)
                 for ln in nbfm_line_spectrum(p, allow_wideband=True)}
    fc, fm = p.f_c, 1.0 / p.T_c
    freqs = np.array([-(fc + fm), -fc, -(fc - fm), fc - fm, fc, fc + fm])
    c = carrier(p, n_periods, sample_rate)
    measured = dft_magnitude(c, freqs)
    carrier_level = float(measured[4])
    report = SpectrumReport(mu, int(n_periods), float(sample_rate))
    for f, meas in zip(freqs, measured):
        pred = predicted.get(round(float(f), 9), 0.0)
        rel = abs(meas - pred) / pred if pred > 0 else None
        level = 20.0 * math.log10(max(meas, 1e-300) / carrier_level)
        report.lines.append(LineCheck(float(f), float(pred), float(meas), rel, level))
    return report


def stft_ridge(s: SampledSignal, window_len: int, *, hop=None, pad_factor=4):
    """Peak frequency (Hz) of each short-time spectrum frame.

    Uses a Hann window, ``pad_factor``-times zero padding and parabolic
    interpolation of the log-magnitude peak. Returns ``(times, freqs)`` where
    ``times`` are frame centres on the signal's own time axis.
    """
    hop = window_len // 4 if hop is None else hop
    nfft = int(pad_factor * window_len)
    f, t, Z = sps.stft(s.samples, fs=s.sample_rate, window="hann", nperseg=window_len,
                       noverlap=window_len - hop, nfft=nfft, boundary=None, padded=False,
                       return_onesided=True)
    mag = np.log(np.abs(Z) + 1e-300)
    k = np.clip(np.argmax(mag, axis=0), 1, len(f) - 2)
    cols = np.arange(mag.shape[1])
    a, b, c = mag[k - 1, cols], mag[k, cols], mag[k + 1, cols]
    denom = a - 2.0 * b + c
    delta = np.where(denom != 0, 0.5 * (a - c) / np.where(denom != 0, denom, 1.0), 0.0)
    df = f[1] - f[0]
    return s.t0 + t, f[k] + delta * df


def ridge_slope(times, freqs_hz, p: SweepParams, guard: float = 0.0):
    """Least-squares slope and intercept (rad/s^2, rad/s) of the ridge vs wrapped time.

    Frames centred within ``guard`` seconds of a sweep boundary are dropped;
    pass half the STFT window length.
    """
    tw = wrapped_time(times, p)
    keep = np.abs(tw) < 0.5 * p.T_c - guard
    slope, intercept = np.polyfit(tw[keep], freqs_hz[keep], 1)
    return 2.0 * math.pi * slope, 2.0 * math.pi * intercept
