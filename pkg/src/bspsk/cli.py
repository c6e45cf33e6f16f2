"""Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, kernels
from .errors import BspskError, ConfigError, DomainError, EmptyReportError
from .harness import (apply_env_overrides, emit_results, load_config, preset, run_scenario,
                      save_config)
from .harness.presets import PRESETS
from .spectrum import validate_spectrum

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


def _cmd_run(args):
    cfg = load_config(args.config)
    cfg, source = apply_env_overrides(cfg)
    report = run_scenario(cfg, workers=args.workers, seed_source=source)
    paths = emit_results(report, args.out, waveforms=cfg.record_waveforms)
    for snr, ber, n in zip(report.snr_db, report.ber, report.n_bits):
        label = "noiseless" if snr is None else f"{snr:g} dB"
        print(f"{label:>10}  ber={ber:.3e}  bits={n}")
    print(f"wrote {len(paths)} files to {args.out} in {report.runtime_s:.2f} s")
    return EXIT_OK


def _cmd_preset(args):
    cfg = preset(args.name)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        path = save_config(cfg, out / f"{args.name}.json")
    except OSError as exc:
        raise BspskError(f"cannot write preset to {out}: {exc}") from exc
    print(path)
    return EXIT_OK


def _cmd_validate_spectrum(args):
    cfg = load_config(args.config)
    report = validate_spectrum(cfg.sweep, cfg.sample_rate, args.periods)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(f"modulation index {report.modulation_index:.4g}, {report.n_periods} periods")
        print(f"{'freq_hz':>16} {'predicted':>12} {'measured':>12} {'rel_err':>10} {'dB':>8}")
        for ln in report.lines:
            rel = "-" if ln.rel_error is None else f"{ln.rel_error:.3e}"
            print(f"{ln.frequency_hz:16.3f} {ln.predicted:12.6f} {ln.measured:12.6f} "
                  f"{rel:>10} {ln.level_db:8.2f}")
        print(f"max relative error {report.max_rel_error:.3e}")
    return EXIT_OK


def _cmd_version(args):
    print(f"bspsk {__version__} (kernels: {kernels.BACKEND})")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="bspsk", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario and write results")
    p.add_argument("--config", required=True, help="scenario JSON file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("preset", help="write a named preset's config")
    p.add_argument("name", choices=sorted(PRESETS))
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_preset)

    p = sub.add_parser("validate-spectrum", help="compare the carrier spectrum to the line model")
    p.add_argument("--config", required=True)
    p.add_argument("--periods", type=int, default=8, help="sweep periods to analyse (>= 8)")
    p.add_argument("--json", action="store_true", help="print the report as JSON")
    p.set_defaults(func=_cmd_validate_spectrum)

    p = sub.add_parser("version", help="print the package version")
    p.set_defaults(func=_cmd_version)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; a bad command line is a config error here
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except (ConfigError, DomainError, EmptyReportError) as exc:
        print(f"bspsk: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BspskError as exc:
        print(f"bspsk: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001
        print(f"bspsk: runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
