import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bspsk.errors import ConfigError, FramingError
from bspsk.signal import SampledSignal, energy, inner_product
from bspsk.spectrum import ridge_slope, stft_ridge
from bspsk.sweep import (ModulationParams, SweepParams, basis_pair, carrier, check_compatible,
                         constellation, instantaneous_frequency, labels_to_bits, bits_to_labels,
                         modulate, mpsk_map, sawtooth, slot_center_frequency, sweep_bandwidth,
                         sweep_phase, wrapped_time)

UNIT = SweepParams(omega_c=100.0, K=2.0, K_f=1.0, T_c=1.0)


def test_sawtooth_values():
    assert sawtooth(0.0, UNIT) == 0.0
    assert sawtooth(0.25, UNIT) == pytest.approx(0.5)
    # wrapped into the previous half-period; oracle: 10^4-term sine series
    n = np.arange(1, 10001)
    series = (UNIT.K * UNIT.T_c / np.pi) * np.sum((-1.0) ** (n + 1) / n
                                                  * np.sin(2 * np.pi * n * 0.75 / UNIT.T_c))
    assert series == pytest.approx(-0.5, abs=1e-2)
    assert sawtooth(0.75, UNIT) == pytest.approx(-0.5)


def test_wrapped_time_range():
    t = np.linspace(-3, 3, 1001)
    w = wrapped_time(t, UNIT)
    assert np.all(w >= -0.5) and np.all(w < 0.5)


def test_sweep_phase_lower_limit():
    p = SweepParams(omega_c=1e4, K=1.0, K_f=50.0, T_c=0.01)
    assert sweep_phase(-p.T_c / 2, p) == pytest.approx(p.omega_c * -p.T_c / 2, rel=1e-14)


def test_sweep_phase_period_increment():
    p = SweepParams(omega_c=1e4, K=1.0, K_f=5e4, T_c=0.01)
    inc = sweep_phase(p.T_c / 2 - 1e-15, p) - sweep_phase(-p.T_c / 2, p)
    assert inc == pytest.approx(p.omega_c * p.T_c, rel=1e-8)
    # oracle: trapezoid integral of the instantaneous frequency at 10^6 steps
    t = np.linspace(-p.T_c / 2, p.T_c / 2, 1_000_001)
    w = p.omega_c + p.sweep_rate * t
    num = np.sum(0.5 * (w[1:] + w[:-1]) * np.diff(t))
    assert abs(num - p.omega_c * p.T_c) / (p.omega_c * p.T_c) < 1e-8


def test_phase_derivative_at_origin():
    p = SweepParams(omega_c=1e4, K=1.0, K_f=5e4, T_c=0.01)
    h = 1e-7
    d = (sweep_phase(h, p) - sweep_phase(-h, p)) / (2 * h)
    assert d == pytest.approx(p.omega_c, rel=1e-6)


def test_phase_continuous_across_sweeps():
    p = SweepParams(omega_c=1e4, K=3.0, K_f=2e4, T_c=0.01)
    for n in range(-3, 4):
        edge = (n + 0.5) * p.T_c
        eps = 1e-12
        jump = sweep_phase(edge + eps, p) - sweep_phase(edge - eps, p)
        assert abs(jump - p.omega_c * 2 * eps) < 1e-9


def test_instantaneous_frequency_edges():
    p = SweepParams(omega_c=1e4, K=0.5, K_f=2e4, T_c=0.01)
    half = p.sweep_rate * p.T_c / 2
    assert instantaneous_frequency(0.0, p) == p.omega_c
    assert instantaneous_frequency(-p.T_c / 2, p) == pytest.approx(p.omega_c - half)
    assert instantaneous_frequency(p.T_c / 2 - 1e-12, p) == pytest.approx(p.omega_c + half, rel=1e-9)
    assert p.omega_c + half == pytest.approx(p.omega_c + p.bandwidth / 2)


def test_bandwidth_examples():
    assert sweep_bandwidth(SweepParams(1e5, 0.75, 120.0, 31.25e-3)) == pytest.approx(2.8125)
    assert sweep_bandwidth(SweepParams(1e5, 1.0, 2 * np.pi * 1e6, 1e-3)) == pytest.approx(6283.19, abs=0.01)
    a = SweepParams(1e5, 1.0, 100.0, 1e-3)
    b = SweepParams(1e5, 1.0, 100.0, 2e-3)
    assert sweep_bandwidth(b) == pytest.approx(2 * sweep_bandwidth(a))


def test_sweep_params_validation():
    with pytest.raises(ConfigError):
        SweepParams(omega_c=1.0, K=1.0, K_f=100.0, T_c=1.0)  # band crosses zero
    with pytest.raises(ConfigError):
        SweepParams(omega_c=1.0, K=1.0, K_f=-1.0, T_c=1.0)
    assert SweepParams(omega_c=1.0, K=1.0, K_f=0.0, T_c=1.0).bandwidth == 0.0


def test_check_compatible(small_sweep, small_mod):
    check_compatible(small_sweep, small_mod)
    with pytest.raises(ConfigError):
        check_compatible(small_sweep, ModulationParams(2, 1e-4, 1.0, 9))
    odd = SweepParams.from_band(2.0005e6, 400e3, 1e-3)
    with pytest.raises(ConfigError):
        check_compatible(odd, small_mod)
    check_compatible(odd, small_mod, allow_fractional_cycles=True)


def test_basis_pair_orthonormal_every_slot(small_sweep, small_mod, small_fs):
    for k in range(small_mod.m):
        bi, bq = basis_pair(small_sweep, small_mod, k, small_fs)
        assert abs(energy(bi) - 1) < 1e-3
        assert abs(energy(bq) - 1) < 1e-3
        assert abs(inner_product(bi, bq)) < 1e-3


def test_basis_pair_unswept_is_fixed_frequency(small_mod, small_fs):
    p = SweepParams(2 * np.pi * 20e3, 1.0, 0.0, 1e-3)
    bi, bq = basis_pair(p, small_mod, 3, small_fs)
    t = bi.times()
    a = np.sqrt(2 / small_mod.T_s)
    np.testing.assert_allclose(bi.samples, a * np.cos(p.omega_c * t), atol=1e-9)
    np.testing.assert_allclose(bq.samples, a * np.sin(p.omega_c * t), atol=1e-9)


def test_mpsk_map_bpsk():
    mp = ModulationParams(2, 1.0, 1.0, 1)
    np.testing.assert_allclose(mpsk_map([1], mp), [[1.0, 0.0]])
    np.testing.assert_allclose(mpsk_map([0], mp), [[-1.0, 0.0]])


@pytest.mark.parametrize("M", [2, 4, 8, 16])
def test_constellation_constant_energy_and_gray(M):
    mp = ModulationParams(M, 1.0, 2.5, 1)
    pts, labels = constellation(mp)
    np.testing.assert_allclose(np.sum(pts ** 2, axis=1), 2.5, atol=1e-12)
    assert sorted(labels) == list(range(M))
    for k in range(M):
        diff = labels[k] ^ labels[(k + 1) % M]
        assert bin(int(diff)).count("1") == 1


@pytest.mark.parametrize("M", [2, 4, 8])
def test_labels_round_trip(M):
    k = int(math.log2(M))
    bits = np.array(list(itertools.product([0, 1], repeat=k))).ravel()
    np.testing.assert_array_equal(labels_to_bits(bits_to_labels(bits, k), k), bits)


def test_modulate_all_ones_is_scaled_basis(small_sweep, small_mod, small_fs):
    s = modulate(np.ones(small_mod.m, dtype=int), small_sweep, small_mod, 1, small_fs)
    parts = [basis_pair(small_sweep, small_mod, k, small_fs)[0].samples for k in range(small_mod.m)]
    np.testing.assert_allclose(s.samples, np.sqrt(small_mod.E_s) * np.concatenate(parts), atol=1e-9)


def test_modulate_slot_energy(small_sweep, small_mod, small_fs, rng):
    bits = rng.integers(0, 2, 3 * small_mod.m)
    s = modulate(bits, small_sweep, small_mod, 3, small_fs)
    n = int(small_mod.T_s * small_fs)
    for k in range(3 * small_mod.m):
        assert energy(s.slice(k * n, (k + 1) * n)) == pytest.approx(small_mod.E_s, rel=5e-3)


def test_modulate_too_few_bits(small_sweep, small_mod, small_fs):
    with pytest.raises(FramingError):
        modulate(np.ones(5, dtype=int), small_sweep, small_mod, 1, small_fs)


def test_modulate_rejects_low_sample_rate(small_sweep, small_mod):
    with pytest.raises(ConfigError):
        modulate(np.ones(10, dtype=int), small_sweep, small_mod, 1, 100e3)


@pytest.mark.parametrize("M", [2, 4, 8])
def test_constant_modulus(M, small_sweep, small_fs, rng):
    mp = ModulationParams(M, 1e-4, 1.0, 10)
    bits = rng.integers(0, 2, 2 * mp.m * mp.bits_per_symbol)
    s = modulate(bits, small_sweep, mp, 2, small_fs)
    # quadrature companion of each slot, built from the mapped symbols
    n = int(mp.T_s * small_fs)
    iq = np.repeat(mpsk_map(bits, mp), n, axis=0)
    theta = sweep_phase(s.times(), small_sweep)
    quad = mp.amplitude * (iq[:, 0] * np.sin(theta) - iq[:, 1] * np.cos(theta))
    env = np.hypot(s.samples, quad)
    keep = np.ones(len(s), dtype=bool)
    for b in range(n, len(s), n):
        keep[b - 1:b + 1] = False
    dev = np.max(np.abs(env[keep] - mp.amplitude)) / mp.amplitude
    assert dev < 0.02


def test_modulated_ridge_slope():
    p = SweepParams.from_band(f_c=200e3, bandwidth_hz=100e3, T_c=2e-3, K=1.0)
    mp = ModulationParams(2, 2e-4, 1.0, 10)
    fs = 2e6
    s = modulate(np.ones(mp.m, dtype=int), p, mp, 1, fs)
    t, f = stft_ridge(s, 256, hop=32)
    slope, _ = ridge_slope(t, f, p, guard=2e-4)
    assert slope == pytest.approx(p.sweep_rate, rel=0.02)


def test_slot_center_frequency(small_sweep, small_mod):
    f0 = slot_center_frequency(small_sweep, small_mod, 0)
    assert f0 == pytest.approx(1.8e6 + 20e3)
    assert slot_center_frequency(small_sweep, small_mod, 10) == pytest.approx(f0)


def test_carrier_matches_phase(small_sweep, small_fs):
    c = carrier(small_sweep, 2, small_fs, amplitude=3.0)
    np.testing.assert_allclose(c.samples, 3.0 * np.cos(sweep_phase(c.times(), small_sweep)))
    assert c.t0 == pytest.approx(-small_sweep.T_c / 2)


@settings(max_examples=40, deadline=None)
@given(st.floats(-5.0, 5.0), st.floats(0.01, 10.0), st.floats(0.1, 3.0))
def test_wrapped_frequency_within_band(t, T_c, K):
    p = SweepParams(omega_c=1e3, K=K, K_f=1.0, T_c=T_c)
    w = instantaneous_frequency(t, p)
    assert p.omega_c - p.bandwidth / 2 - 1e-9 <= w < p.omega_c + p.bandwidth / 2 + 1e-9
