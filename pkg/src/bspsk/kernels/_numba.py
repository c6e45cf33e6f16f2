"""numba-compiled kernel implementations."""

import math

import numpy as np
from numba import config, njit, prange

# try OpenMP before TBB; an outdated system TBB otherwise warns on first launch
config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]


@njit(cache=True, parallel=True)
def _sweep_phase(t, omega_c, K, K_f, T_c):
    half = 0.5 * T_c
    quad = 0.5 * K_f * K
    out = np.empty(t.shape[0])
    for i in prange(t.shape[0]):
        u = t[i] + half
        tw = u - T_c * math.floor(u / T_c) - half
        out[i] = omega_c * t[i] + quad * (tw * tw - half * half)
    return out


def sweep_phase(t, omega_c, K, K_f, T_c):
    t = np.ascontiguousarray(t, dtype=np.float64)
    flat = _sweep_phase(t.ravel(), float(omega_c), float(K), float(K_f), float(T_c))
    return flat.reshape(t.shape)


@njit(cache=True, parallel=True)
def _goertzel(x, w):
    n = x.shape[0]
    out = np.empty(w.shape[0])
    for k in prange(w.shape[0]):
        coeff = 2.0 * math.cos(w[k])
        s1 = x[0] * 0.0
        s2 = x[0] * 0.0
        for i in range(n):
            s0 = x[i] + coeff * s1 - s2
            s2 = s1
            s1 = s0
        # X(w) = exp(jw(N-1)) * (s1 - exp(-jw) s2); only the magnitude is kept
        re = s1 - math.cos(w[k]) * s2
        im = math.sin(w[k]) * s2
        out[k] = abs(re + 1j * im) / n
    return out


def dtft_magnitude(x, w):
    x = np.ascontiguousarray(x)
    if not np.iscomplexobj(x):
        x = x.astype(np.float64, copy=False)
    else:
        x = x.astype(np.complex128, copy=False)
    return _goertzel(x, np.ascontiguousarray(w, dtype=np.float64))


@njit(cache=True)
def _tapped_delay(x, delays, gains, y):
    n = x.shape[0]
    for k in range(delays.shape[0]):
        d = delays[k]
        g = gains[k]
        for i in range(n):
            y[d + i] += g * x[i]
    return y


def tapped_delay(x, delays, gains):
    x = np.ascontiguousarray(x)
    delays = np.ascontiguousarray(delays, dtype=np.int64)
    gains = np.asarray(gains)
    out_dtype = np.result_type(x.dtype, gains.dtype, np.float64)
    y = np.zeros(x.shape[0] + int(delays.max()), dtype=out_dtype)
    return _tapped_delay(x.astype(out_dtype, copy=False), delays, gains.astype(out_dtype), y)


@njit(cache=True, parallel=True)
def _integrate_dump(x, ref, n_per, out):
    for b in prange(out.shape[0]):
        acc = out[b] * 0.0
        base = b * n_per
        for i in range(n_per):
            acc += x[base + i] * ref[base + i]
        out[b] = acc
    return out


def integrate_dump(x, ref, n_per):
    x = np.ascontiguousarray(x)
    ref = np.ascontiguousarray(ref)
    out_dtype = np.result_type(x.dtype, ref.dtype, np.float64)
    out = np.zeros(x.shape[0] // n_per, dtype=out_dtype)
    return _integrate_dump(x.astype(out_dtype, copy=False), ref.astype(out_dtype, copy=False),
                           int(n_per), out)
