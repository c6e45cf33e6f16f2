"""Write and read run artefacts: results.json plus CSV tables."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from ..errors import BspskError
from .runner import TrialReport

RESULTS_JSON = "results.json"
BER_CSV = "ber_vs_snr.csv"
TRANSFER_CSV = "transfer_estimate.csv"
SPECTRUM_CSV = "spectrum_check.csv"
WAVEFORMS_CSV = "waveforms.csv"


class ResultsIOError(BspskError, OSError):
    """Reading or writing an output file failed."""


def _write_csv(path: Path, header, rows):
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise ResultsIOError(f"cannot write {path}: {exc}") from exc


def _snr_label(v):
    return "inf" if v is None else repr(float(v))


def emit_results(report: TrialReport, out_dir, *, waveforms=True) -> list:
    """Write every artefact for ``report`` under ``out_dir``; return the paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ResultsIOError(f"cannot create output directory {out}: {exc}") from exc
    written = []

    path = out / RESULTS_JSON
    try:
        path.write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    except OSError as exc:
        raise ResultsIOError(f"cannot write {path}: {exc}") from exc
    written.append(path)

    path = out / BER_CSV
    _write_csv(path, ["snr_db", "ber", "n_bits"],
               [[_snr_label(s), repr(b), n] for s, b, n in zip(report.snr_db, report.ber, report.n_bits)])
    written.append(path)

    if report.transfer is not None:
        t = report.transfer
        path = out / TRANSFER_CSV
        _write_csv(path, ["frequency_hz", "mag_true", "mag_est", "valid"],
                   [[repr(f), repr(a), repr(b), int(v)] for f, a, b, v in
                    zip(t["frequency_hz"], t["mag_true"], t["mag_est"], t["valid"])])
        written.append(path)

    if report.spectrum_check is not None:
        path = out / SPECTRUM_CSV
        rows = [[repr(c["frequency_hz"]), repr(c["predicted"]), repr(c["measured"]),
                 "" if c["rel_error"] is None else repr(c["rel_error"]), repr(c["level_db"])]
                for c in report.spectrum_check["lines"]]
        _write_csv(path, ["frequency_hz", "predicted", "measured", "rel_error", "level_db"], rows)
        written.append(path)

    if waveforms and report.waveforms is not None:
        w = report.waveforms
        cols = ["t_s", "sawtooth", "transmitted", "received", "envelope"]
        path = out / WAVEFORMS_CSV
        _write_csv(path, cols, np.column_stack([np.asarray(w[c], dtype=float) for c in cols]).tolist())
        written.append(path)
    return written


def load_results(out_dir) -> TrialReport:
    path = Path(out_dir) / RESULTS_JSON
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ResultsIOError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ResultsIOError(f"{path} is not valid JSON: {exc}") from exc
    return TrialReport.from_dict(data)


def load_ber_csv(out_dir):
    """``(snr_db, ber, n_bits)`` arrays from ber_vs_snr.csv; noiseless rows read as inf."""
    path = Path(out_dir) / BER_CSV
    try:
        with path.open(newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise ResultsIOError(f"cannot read {path}: {exc}") from exc
    return (np.array([float(r["snr_db"]) for r in rows]),
            np.array([float(r["ber"]) for r in rows]),
            np.array([int(r["n_bits"]) for r in rows]))
