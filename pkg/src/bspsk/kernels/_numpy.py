"""Pure-numpy kernel implementations (reference path)."""

import numpy as np

_DTFT_BLOCK = 1 << 15


def sweep_phase(t, omega_c, K, K_f, T_c):
    t = np.asarray(t, dtype=np.float64)
    half = 0.5 * T_c
    tw = np.mod(t + half, T_c) - half
    return omega_c * t + 0.5 * K_f * K * (tw * tw - half * half)


def dtft_magnitude(x, w):
    x = np.asarray(x)
    w = np.asarray(w, dtype=np.float64)
    n_samp = x.shape[0]
    acc = np.zeros(w.shape[0], dtype=np.complex128)
    for start in range(0, n_samp, _DTFT_BLOCK):
        stop = min(start + _DTFT_BLOCK, n_samp)
        n = np.arange(start, stop, dtype=np.float64)
        acc += np.exp(-1j * np.outer(w, n)) @ x[start:stop]
    return np.abs(acc) / n_samp


def tapped_delay(x, delays, gains):
    x = np.asarray(x)
    delays = np.asarray(delays, dtype=np.int64)
    gains = np.asarray(gains)
    out_dtype = np.result_type(x.dtype, gains.dtype, np.float64)
    n = x.shape[0]
    y = np.zeros(n + int(delays.max()), dtype=out_dtype)
    for d, g in zip(delays, gains):
        y[d:d + n] += g * x
    return y


def integrate_dump(x, ref, n_per):
    x = np.asarray(x)
    ref = np.asarray(ref)
    n_blocks = x.shape[0] // n_per
    prod = (x[: n_blocks * n_per] * ref[: n_blocks * n_per]).reshape(n_blocks, n_per)
    return prod.sum(axis=1)
