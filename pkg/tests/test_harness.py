import csv
import json
from dataclasses import replace

import numpy as np
import pytest

from bspsk.channel import TapProfile
from bspsk.errors import ConfigError, EmptyReportError, FramingError, StageError
from bspsk.harness import (ChannelConfig, ScenarioConfig, apply_env_overrides, emit_results,
                           load_ber_csv, load_config, load_results, preset, resolvable,
                           run_scenario, run_trial, save_config, validate_config)
from bspsk.harness import runner
from bspsk.harness.results import ResultsIOError
from bspsk.sweep import SweepParams


@pytest.fixture(scope="module")
def quick_awgn():
    return replace(preset("flat_awgn"), n_trials=3, sweeps_per_realization=1,
                   snr_db_list=(0.0, 4.0))


@pytest.fixture(scope="module")
def quick_2tap():
    return replace(preset("selfconsistent_2tap"), n_trials=1, snr_db_list=(None, 20.0))


@pytest.fixture(scope="module")
def quick_2tap_report(quick_2tap):
    return run_scenario(quick_2tap)


def test_preset_fig12_bandwidth():
    cfg = preset("paper_fig12")
    assert cfg.sweep.bandwidth == pytest.approx(2.8125)
    assert not resolvable(cfg)


def test_preset_flat_awgn_single_tap():
    taps = preset("flat_awgn").channel.taps
    assert taps.delays == (0.0,) and taps.powers_db == (0.0,)


def test_preset_selfconsistent_valid():
    cfg = preset("selfconsistent_2tap")
    assert cfg.sweep.bandwidth_hz >= 3e6
    assert cfg.sweep.omega_c > np.pi * cfg.sweep.bandwidth_hz
    assert resolvable(cfg)
    assert cfg.sweep.bandwidth_hz == pytest.approx(4e6)
    validate_config(cfg)


def test_unknown_preset():
    with pytest.raises(ConfigError):
        preset("nope")


@pytest.mark.parametrize("name", ["paper_fig12", "selfconsistent_2tap", "flat_awgn"])
def test_config_round_trip(name, tmp_path):
    cfg = preset(name)
    assert ScenarioConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg
    assert load_config(save_config(cfg, tmp_path / "c.json")) == cfg


@pytest.mark.parametrize("change", [
    dict(sample_rate=50e6),                                   # below 8x top frequency
    dict(estimator_mode="psychic"),
    dict(snr_reference="volts"),
    dict(snr_db_list=()),
    dict(snr_db_list=(float("nan"),)),
    dict(n_trials=-1),
    dict(seed=-3),
    dict(sweeps_per_realization=0),
    dict(n_freq_points=4),
    dict(spectral_check=True),                                # modulation index far too big
    dict(channel=ChannelConfig(TapProfile((0.0, 1e-6), (0.0, -4.0)), mode="rician")),
])
def test_validation_rejects(change):
    with pytest.raises(ConfigError):
        validate_config(replace(preset("selfconsistent_2tap"), **change))


def test_validation_rejects_off_grid_delay():
    # 25 us slots stay whole at 96.04 MHz but 1 us is 96.04 samples
    with pytest.raises(ConfigError, match="sample grid"):
        validate_config(replace(preset("selfconsistent_2tap"), sample_rate=96.04e6))


def test_validation_rejects_poor_separation():
    # 60-70 kHz band over 1 ms: the carrier sits too close to the envelope cutoff
    cfg = replace(preset("flat_awgn"), sweep=SweepParams.from_band(65e3, 10e3, 1e-3, K=1.0),
                  sample_rate=10e6, estimator_mode="sounding", allow_fractional_carrier_cycles=True)
    with pytest.raises(ConfigError, match="separation"):
        validate_config(cfg)


def test_validation_rejects_mismatched_slots():
    cfg = preset("selfconsistent_2tap")
    with pytest.raises(ConfigError):
        validate_config(replace(cfg, modulation=replace(cfg.modulation, m=39)))


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)
    partial = tmp_path / "partial.json"
    partial.write_text(json.dumps({"name": "x"}))
    with pytest.raises(ConfigError):
        load_config(partial)
    old = tmp_path / "old.json"
    d = preset("flat_awgn").to_dict()
    d["schema_version"] = 99
    old.write_text(json.dumps(d))
    with pytest.raises(ConfigError):
        load_config(old)


def test_env_override():
    cfg = preset("flat_awgn")
    assert apply_env_overrides(cfg, {}) == (cfg, "config")
    new, src = apply_env_overrides(cfg, {"BSPSK_SEED": "99"})
    assert new.seed == 99 and src == "env:BSPSK_SEED"
    with pytest.raises(ConfigError):
        apply_env_overrides(cfg, {"BSPSK_SEED": "abc"})


def test_ebn0_conversion():
    cfg = preset("flat_awgn")
    # 2*log2(M)/(T_s*fs) = 2/100 -> -16.99 dB
    assert cfg.per_sample_snr_db(0.0) == pytest.approx(10 * np.log10(0.02))
    assert cfg.per_sample_snr_db(None) is None
    assert replace(cfg, snr_reference="sample").per_sample_snr_db(3.0) == 3.0


def test_empty_report():
    with pytest.raises(EmptyReportError):
        run_scenario(replace(preset("flat_awgn"), n_trials=0))


def test_noiseless_2tap_estimate(quick_2tap_report):
    r = quick_2tap_report
    assert r.est_rms_error[0] < 0.02
    assert r.est_rms_error[1] < 0.06
    assert r.ber[0] == 0.0
    assert r.tap_delay_errors[0] == 0.0
    assert all(0 <= b <= 1 for b in r.ber)


def test_stage_named_on_failure(monkeypatch, quick_awgn):
    def boom(*a, **k):
        raise FramingError("synthetic")
    monkeypatch.setattr(runner, "modulate", boom)
    with pytest.raises(StageError) as exc:
        run_scenario(quick_awgn)
    assert exc.value.stage == "modulate"
    assert "modulate" in str(exc.value)


def strip_runtime(d):
    d = dict(d)
    d.pop("runtime_s")
    return d


def test_deterministic_and_worker_independent(quick_awgn):
    a = run_scenario(quick_awgn)
    b = run_scenario(quick_awgn)
    c = run_scenario(quick_awgn, workers=2)
    assert strip_runtime(a.to_dict()) == strip_runtime(b.to_dict()) == strip_runtime(c.to_dict())


def test_trials_independent(quick_awgn):
    rep = run_scenario(quick_awgn)
    for i in range(len(quick_awgn.snr_db_list)):
        per = [run_trial(quick_awgn, i, t).ber for t in range(quick_awgn.n_trials)]
        assert rep.ber[i] == pytest.approx(np.mean(per), rel=1e-12, abs=1e-15)
    # a trial's outcome does not depend on how many trials run
    fewer = run_scenario(replace(quick_awgn, n_trials=1))
    assert fewer.bit_errors[0] == run_trial(quick_awgn, 0, 0).bit_errors


def test_snr_points_share_channel_and_bits(quick_awgn):
    a, b = run_trial(quick_awgn, 0, 1), run_trial(quick_awgn, 1, 1)
    assert a.n_bits == b.n_bits
    assert a.bit_errors >= b.bit_errors  # same bits, less noise


def test_emit_round_trip(quick_2tap_report, tmp_path):
    paths = emit_results(quick_2tap_report, tmp_path)
    names = {p.name for p in paths}
    assert {"results.json", "ber_vs_snr.csv", "transfer_estimate.csv"} <= names
    back = load_results(tmp_path)
    assert back == quick_2tap_report
    data = json.loads((tmp_path / "results.json").read_text())
    assert "config_echo" in data and "seed_record" in data
    assert data["schema_version"] == 1
    with (tmp_path / "transfer_estimate.csv").open() as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["frequency_hz", "mag_true", "mag_est", "valid"]
    assert len(rows) - 1 == quick_2tap_report.config_echo["n_freq_points"]
    snr, ber, nb = load_ber_csv(tmp_path)
    assert np.isinf(snr[0]) and snr[1] == 20.0
    np.testing.assert_array_equal(ber, quick_2tap_report.ber)


def test_emit_io_error(quick_2tap_report, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(ResultsIOError, match="file"):
        emit_results(quick_2tap_report, blocker / "sub")
    with pytest.raises(ResultsIOError):
        load_results(tmp_path / "nothing")


def test_fig12_preset_outputs(tmp_path):
    rep = run_scenario(preset("paper_fig12"))
    paths = {p.name for p in emit_results(rep, tmp_path)}
    assert {"spectrum_check.csv", "waveforms.csv", "transfer_estimate.csv"} <= paths
    assert rep.tap_delay_errors == [None]
    assert rep.spectrum_check["max_rel_error"] < 0.01
    with (tmp_path / "waveforms.csv").open() as fh:
        header = next(csv.reader(fh))
    assert header == ["t_s", "sawtooth", "transmitted", "received", "envelope"]
