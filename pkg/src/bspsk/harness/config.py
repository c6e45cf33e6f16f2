"""Scenario configuration: dataclasses, JSON round-trip and validation."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..channel import TapProfile, delay_samples, draw_realization
from ..errors import ConfigError
from ..receiver import SEPARATION_MARGIN, separation_margin
from ..spectrum import NBFM_MAX_INDEX, modulation_index
from ..sweep import (ModulationParams, SweepParams, check_compatible, check_sample_rate,
                     samples_per)

SCHEMA_VERSION = 1
ESTIMATOR_MODES = ("sounding", "modulated", "genie")
CHANNEL_MODES = ("fixed", "rayleigh")
SNR_REFERENCES = ("sample", "ebn0")
SEED_ENV = "BSPSK_SEED"


@dataclass(frozen=True)
class ChannelConfig:
    taps: TapProfile
    mode: str = "fixed"
    complex_gains: bool = False

    def to_dict(self):
        return {"taps": self.taps.to_config(), "mode": self.mode,
                "complex_gains": self.complex_gains}


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything one run needs.

    ``snr_db_list`` entries are dB values or ``None`` for a noiseless point.
    With ``snr_reference="sample"`` they are per-sample SNR at the receiver
    input; with ``"ebn0"`` they are Eb/N0 and are converted using the sample
    rate and symbol duration.
    """

    name: str
    sweep: SweepParams
    modulation: ModulationParams
    channel: ChannelConfig
    sample_rate: float
    snr_db_list: tuple = (None,)
    n_trials: int = 1
    sweeps_per_realization: int = 1
    seed: int = 0
    estimator_mode: str = "sounding"
    snr_reference: str = "sample"
    n_freq_points: int = 1024
    allow_fractional_carrier_cycles: bool = False
    record_waveforms: bool = False
    spectral_check: bool = False
    description: str = field(default="", compare=False)

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "description": self.description,
            "sweep": {"omega_c": self.sweep.omega_c, "K": self.sweep.K,
                      "K_f": self.sweep.K_f, "T_c": self.sweep.T_c},
            "modulation": {"M": self.modulation.M, "T_s": self.modulation.T_s,
                           "E_s": self.modulation.E_s, "m": self.modulation.m},
            "channel": self.channel.to_dict(),
            "sample_rate": self.sample_rate,
            "snr_db_list": list(self.snr_db_list),
            "snr_reference": self.snr_reference,
            "n_trials": self.n_trials,
            "sweeps_per_realization": self.sweeps_per_realization,
            "seed": self.seed,
            "estimator_mode": self.estimator_mode,
            "n_freq_points": self.n_freq_points,
            "allow_fractional_carrier_cycles": self.allow_fractional_carrier_cycles,
            "record_waveforms": self.record_waveforms,
            "spectral_check": self.spectral_check,
        }

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        version = d.pop("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {version}")
        try:
            sweep = SweepParams(**d.pop("sweep"))
            modulation = ModulationParams(**d.pop("modulation"))
            ch = dict(d.pop("channel"))
            channel = ChannelConfig(TapProfile.from_config(ch.pop("taps")), **ch)
            snr = tuple(None if v is None else float(v) for v in d.pop("snr_db_list"))
            return cls(sweep=sweep, modulation=modulation, channel=channel, snr_db_list=snr, **d)
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed configuration: {exc}") from exc

    def per_sample_snr_db(self, value):
        """Per-sample SNR (dB) for one ``snr_db_list`` entry."""
        if value is None:
            return None
        if self.snr_reference == "sample":
            return value
        mp = self.modulation
        return value + 10.0 * math.log10(2.0 * mp.bits_per_symbol / (mp.T_s * self.sample_rate))


def validate_config(cfg: ScenarioConfig) -> ScenarioConfig:
    """Raise ConfigError if any module invariant fails; return ``cfg`` otherwise."""
    p, mp = cfg.sweep, cfg.modulation
    check_compatible(p, mp, allow_fractional_cycles=cfg.allow_fractional_carrier_cycles)
    check_sample_rate(p, cfg.sample_rate)
    samples_per(mp.T_s, cfg.sample_rate, "symbol duration")
    samples_per(p.T_c, cfg.sample_rate, "sweep period")
    if cfg.channel.mode not in CHANNEL_MODES:
        raise ConfigError(f"channel mode must be one of {CHANNEL_MODES}")
    delay_samples(draw_realization(cfg.channel.taps, 0, "fixed"), cfg.sample_rate)
    if cfg.estimator_mode not in ESTIMATOR_MODES:
        raise ConfigError(f"estimator_mode must be one of {ESTIMATOR_MODES}")
    if cfg.snr_reference not in SNR_REFERENCES:
        raise ConfigError(f"snr_reference must be one of {SNR_REFERENCES}")
    if not cfg.snr_db_list:
        raise ConfigError("snr_db_list is empty")
    if any(v is not None and not math.isfinite(v) for v in cfg.snr_db_list):
        raise ConfigError("snr_db_list entries must be finite numbers or null")
    if int(cfg.n_trials) != cfg.n_trials or cfg.n_trials < 0:
        raise ConfigError("n_trials must be a non-negative integer")
    if int(cfg.sweeps_per_realization) != cfg.sweeps_per_realization or cfg.sweeps_per_realization < 1:
        raise ConfigError("sweeps_per_realization must be a positive integer")
    if int(cfg.seed) != cfg.seed or cfg.seed < 0:
        raise ConfigError("seed must be a non-negative integer")
    if cfg.n_freq_points < 16:
        raise ConfigError("n_freq_points must be at least 16")
    max_delay = cfg.channel.taps.max_delay
    if cfg.estimator_mode != "genie":
        if p.bandwidth <= 0:
            raise ConfigError("an unswept carrier (K_f = 0) cannot sound the channel")
        margin = separation_margin(p, max_delay)
        if margin < SEPARATION_MARGIN:
            raise ConfigError(f"envelope filter separation margin {margin:.2f} is below "
                              f"{SEPARATION_MARGIN:g}; widen the band gap or slow the sweep")
    if cfg.estimator_mode == "modulated" and 0.4 * mp.T_s <= max_delay:
        raise ConfigError("symbols too short for transient masking at this delay spread")
    if cfg.spectral_check and modulation_index(p) > NBFM_MAX_INDEX:
        raise ConfigError(f"spectral_check needs modulation index <= {NBFM_MAX_INDEX}, "
                          f"got {modulation_index(p):.4g}")
    return cfg


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return validate_config(ScenarioConfig.from_dict(data))


def save_config(cfg: ScenarioConfig, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(cfg.to_dict(), indent=2) + "\n")
    return path


def apply_env_overrides(cfg: ScenarioConfig, environ=None):
    """Apply ``BSPSK_SEED``; return ``(cfg, seed_source)``."""
    environ = os.environ if environ is None else environ
    raw = environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return cfg, "config"
    try:
        seed = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{SEED_ENV}={raw!r} is not an integer") from exc
    if seed < 0:
        raise ConfigError(f"{SEED_ENV} must be non-negative")
    return replace(cfg, seed=seed), f"env:{SEED_ENV}"
