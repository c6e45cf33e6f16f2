"""Named scenarios.

``paper_fig12`` keeps a fixed reference set of constants. Its swept band is
B = K_f*K*T_c = 2.8125 rad/s, far too narrow to resolve a 1 us echo (whose
gain ripple repeats every 1 MHz), so it only produces illustrative waveform
and transfer-curve files. ``selfconsistent_2tap`` keeps the same channel
and picks a sweep that actually covers several ripple periods.
"""

from __future__ import annotations

from ..channel import TapProfile
from ..errors import ConfigError
from ..sweep import ModulationParams, SweepParams
from .config import ChannelConfig, ScenarioConfig, validate_config

TWO_TAP = TapProfile((0.0, 1e-6), (0.0, -4.0))


def _paper_fig12():
    # 31.25 ms at 1 MHz is 31250 samples; 25 slots of 1250 samples each.
    # 1e5 rad/s is not a whole number of cycles per slot, hence the waiver.
    sweep = SweepParams(omega_c=1e5, K=0.75, K_f=120.0, T_c=31.25e-3)
    return ScenarioConfig(
        name="paper_fig12",
        description="reference constants; illustrative output only, band too narrow to measure",
        sweep=sweep,
        modulation=ModulationParams(M=2, T_s=31.25e-3 / 25, E_s=1.0, m=25),
        channel=ChannelConfig(TWO_TAP, mode="rayleigh"),
        sample_rate=1e6,
        snr_db_list=(None,),
        n_trials=1,
        seed=12,
        estimator_mode="sounding",
        allow_fractional_carrier_cycles=True,
        record_waveforms=True,
        spectral_check=True,
    )


def _selfconsistent_2tap():
    # f_c = 10 MHz, B = 4 MHz, T_c = 1 ms: K_f*K = 2*pi*4e9 rad/s^2.
    # K = 1000 keeps the ramp within +-0.5 units.
    sweep = SweepParams.from_band(f_c=10e6, bandwidth_hz=4e6, T_c=1e-3, K=1000.0)
    return ScenarioConfig(
        name="selfconsistent_2tap",
        description="two-ray channel (0 dB, -4 dB at 1 us) swept over 8-12 MHz",
        sweep=sweep,
        # 40 slots of 25 us: 250 carrier cycles each, 100 kHz of sweep per slot
        modulation=ModulationParams(M=2, T_s=25e-6, E_s=1.0, m=40),
        channel=ChannelConfig(TWO_TAP, mode="fixed"),
        sample_rate=96e6,  # 8 x 12 MHz; the 1 us echo is 96 samples
        snr_db_list=(None, 40.0, 20.0, 10.0, 0.0),
        n_trials=4,
        seed=2024,
        estimator_mode="sounding",
    )


def _flat_awgn():
    sweep = SweepParams.from_band(f_c=1e6, bandwidth_hz=200e3, T_c=1e-3, K=1000.0)
    return ScenarioConfig(
        name="flat_awgn",
        description="single unit tap; BPSK bit error rate against Eb/N0",
        sweep=sweep,
        modulation=ModulationParams(M=2, T_s=10e-6, E_s=1.0, m=100),
        channel=ChannelConfig(TapProfile((0.0,), (0.0,)), mode="fixed"),
        sample_rate=10e6,
        snr_db_list=(0.0, 2.0, 4.0, 6.0, 8.0),
        snr_reference="ebn0",
        n_trials=100,
        sweeps_per_realization=10,
        seed=7,
        estimator_mode="modulated",
        n_freq_points=256,
    )


PRESETS = {
    "paper_fig12": _paper_fig12,
    "selfconsistent_2tap": _selfconsistent_2tap,
    "flat_awgn": _flat_awgn,
}


def preset(name: str) -> ScenarioConfig:
    try:
        build = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return validate_config(build())


def resolvable(cfg: ScenarioConfig) -> bool:
    """True when the swept band covers at least one ripple period of the echo."""
    return cfg.sweep.bandwidth_hz * cfg.channel.taps.max_delay >= 1.0 - 1e-12


__all__ = ["PRESETS", "preset", "resolvable"]
