"""Command-line front end: ``phaseqrng {validate,run,sweep,analyze}``.

Exit status: 0 success, 1 validation/battery failure, 2 usage or
configuration error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import yaml

from . import __version__
from . import config as config_mod
from .analysis import autocorrelation, min_entropy, psd_estimate, run_battery, validate_timing
from .errors import ConfigError, InvalidParameterError, UndefinedNormalizationError
from .io import RawWriter, read_raw, write_autocorrelation_csv, write_psd_csv, write_report, write_rows_csv, write_sidecar
from .pipeline import blocked_input_series, run_pipeline

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

SWEEP_PARAMETERS = {
    "control_error_std": "mzi.control_error_std",
    "tau_c": "laser.coherence_time",
    "T_d": "mzi.delay",
    "T_S": "sampling.period",
    "white_noise_std": "detector.fast.white_noise_std",
}

# low-frequency band for the PSD level reported by sweeps: lowest 10% of the Nyquist range
LOW_BAND_FRACTION = 0.1


def cmd_validate(cfg: config_mod.ScenarioConfig, out=None) -> int:
    verdict = validate_timing(cfg.timing_check())
    print(verdict.summary(), file=out or sys.stdout)
    return EXIT_OK if verdict.passed else EXIT_FAIL


def low_frequency_level(spectrum) -> float:
    nyquist = spectrum.frequencies[-1]
    return spectrum.band_level(0.0, LOW_BAND_FRACTION * nyquist)


def _psd_reference(cfg) -> float:
    """Mean density of a blocked-input run; 1.0 when the detector is noiseless."""
    if cfg.detector.fast.noiseless:
        return 1.0
    a = cfg.analysis
    floor = psd_estimate(blocked_input_series(cfg), a.psd_segment, a.psd_window)
    return float(floor.linear_density.mean())


def cmd_run(cfg: config_mod.ScenarioConfig, output_dir, workers: int | None = None, out=None) -> dict:
    """Run the whole chain and write every artifact into ``output_dir``."""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    names = ["bin1", "bin2", "bin3"] if cfg.extraction.xor else ["bin1"]
    created: list[Path] = []
    writers = {}
    try:
        for name in names:
            path = output_dir / f"{name}.raw"
            created.append(path)
            writers[name] = RawWriter(path)

        def sink(b1, b2, b3):
            writers["bin1"].append(b1)
            if b2 is not None:
                writers["bin2"].append(b2)
                writers["bin3"].append(b3)

        result = run_pipeline(cfg, workers=workers, sink=sink)
        streams = {"bin1": result.bin1, "bin2": result.bin2, "bin3": result.bin3}
        files = {}
        for name in names:
            digest = writers[name].close()
            s = streams[name]
            created.append(write_sidecar(output_dir / f"{name}.raw", s.length, s.provenance,
                                         s.generation_rate, digest, master_seed=cfg.master_seed))
            files[f"{name}.raw"] = {"sha256": digest, "bit_length": s.length, "provenance": s.provenance}

        a = cfg.analysis
        acf = {name: autocorrelation(streams[name], a.max_lag) for name in names}
        autocorr_path = output_dir / "autocorr.csv"
        created.append(autocorr_path)
        write_autocorrelation_csv(autocorr_path, acf)

        reference = _psd_reference(cfg)
        spectrum = psd_estimate(result.first_frame, a.psd_segment, a.psd_window, reference)
        psd_path = output_dir / "psd.csv"
        created.append(psd_path)
        write_psd_csv(psd_path, spectrum)

        battery = run_battery(result.output, a.alpha)
        verdict = validate_timing(cfg.timing_check())
        entropy = min_entropy(result.first_frame, a.min_entropy_bins)
        tau_c = cfg.coherence_time
        report = {
            "timing": verdict.to_dict(),
            "battery": battery.to_dict(),
            "streams": {name: {"bit_length": streams[name].length,
                               "ones_fraction": streams[name].ones_fraction(),
                               "max_abs_autocorrelation": float(abs(acf[name]).max())}
                        for name in names},
            "min_entropy": {"per_sample": entropy.per_sample, "per_bit": entropy.per_bit,
                            "bins": entropy.bin_count},
            "phase_difference_variance": {"measured": result.dtheta_variance,
                                          "expected": 2 * cfg.mzi.delay / tau_c},
            "psd": {"reference_density": reference, "low_frequency_db": low_frequency_level(spectrum)},
        }
        report_path = output_dir / "report.yaml"
        created.append(report_path)
        write_report(report_path, report)

        metadata = {
            "package_version": __version__,
            "config": cfg.to_dict(),
            "coherence_time": tau_c,
            "frame_seeds": result.frame_seeds,
            "thresholds": result.thresholds,
            "bit_order": "msb-first",
            "files": files,
        }
        meta_path = output_dir / "metadata.json"
        created.append(meta_path)
        meta_path.write_text(json.dumps(metadata, indent=2) + "\n")
    except BaseException:
        for w in writers.values():
            try:
                w.close()
            except Exception:
                pass
        for path in created:
            Path(path).unlink(missing_ok=True)
        raise
    print(verdict.summary(), file=out or sys.stdout)
    print(battery.summary(), file=out or sys.stdout)
    print(f"wrote {', '.join(p.name for p in created)} to {output_dir}", file=out or sys.stdout)
    return {"files": files, "report": report, "result": result}


def config_from_metadata(path) -> config_mod.ScenarioConfig:
    """Re-parse the scenario embedded in a run's ``metadata.json``."""
    data = yaml.safe_load(Path(path).read_text())
    return config_mod.from_dict(data["config"])


def sweep_point(cfg, sweep_index: int, workers: int | None = None) -> dict:
    result = run_pipeline(cfg, sweep_index=sweep_index, workers=workers)
    a = cfg.analysis
    stream = result.output
    battery = run_battery(stream, a.alpha)
    entropy = min_entropy(result.first_frame, a.min_entropy_bins)
    spectrum = psd_estimate(result.first_frame, a.psd_segment, a.psd_window)
    return {
        "ones_bias": stream.bias(),
        "max_abs_autocorr": float(abs(autocorrelation(stream, a.max_lag)).max()),
        "battery_pass_rate": battery.pass_rate,
        "battery_passed": battery.passed,
        "min_entropy_per_sample": entropy.per_sample,
        "min_entropy_per_bit": entropy.per_bit,
        "dtheta_variance": result.dtheta_variance,
        "lowfreq_psd_db": low_frequency_level(spectrum),
        "output_sha256": hashlib.sha256(stream.to_bytes()).hexdigest(),
    }


def cmd_sweep(cfg, parameter: str, values, output=None, workers: int | None = None, out=None) -> list[dict]:
    """One pipeline run per value (sweep index = position in ``values``)."""
    if parameter not in SWEEP_PARAMETERS:
        raise InvalidParameterError(
            f"unknown sweep parameter {parameter!r}; choose from {', '.join(SWEEP_PARAMETERS)}")
    path = SWEEP_PARAMETERS[parameter]
    rows = []
    for i, value in enumerate(values):
        point = cfg.replace(**{path: value})
        row = {"parameter": parameter, "value": value, **sweep_point(point, i, workers)}
        rows.append(row)
        print(f"{parameter}={value:g}: bias={row['ones_bias']:+.5f} "
              f"max|acf|={row['max_abs_autocorr']:.5f} pass_rate={row['battery_pass_rate']:.2f} "
              f"var(dtheta)={row['dtheta_variance']:.5f} psd_lf={row['lowfreq_psd_db']:.2f} dB", file=out or sys.stdout)
    if output is not None:
        write_rows_csv(output, rows)
    return rows


def cmd_analyze(raw_path, alpha: float = 0.01, max_lag: int = 100, length: int | None = None,
                output_dir=None, out=None) -> tuple[int, dict]:
    stream = read_raw(raw_path, length)
    battery = run_battery(stream, alpha)
    try:
        acf = autocorrelation(stream, min(max_lag, len(stream) - 1))
    except UndefinedNormalizationError:
        acf = None  # constant stream
    report = {"file": str(raw_path), "battery": battery.to_dict(),
              "ones_fraction": stream.ones_fraction(),
              "max_abs_autocorrelation": None if acf is None else float(abs(acf).max())}
    if output_dir is not None:
        output_dir = Path(output_dir)
        output_dir.mkdir(parents=True, exist_ok=True)
        if acf is not None:
            write_autocorrelation_csv(output_dir / "autocorr.csv", {Path(raw_path).stem: acf})
        write_report(output_dir / "report.yaml", report)
    print(battery.summary(), file=out or sys.stdout)
    return (EXIT_OK if battery.passed else EXIT_FAIL), report


def _parse_set(items) -> dict:
    changes = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        changes[key.strip()] = yaml.safe_load(value)
    return changes


def _load_config(args) -> config_mod.ScenarioConfig:
    cfg = config_mod.load(args.config) if args.config else config_mod.reference_scenario()
    changes = _parse_set(args.set)
    if args.seed is not None:
        changes["master_seed"] = args.seed
    if getattr(args, "frames", None) is not None:
        changes["sampling.frame_count"] = args.frames
    if getattr(args, "frame_length", None) is not None:
        changes["sampling.frame_length"] = args.frame_length
    if getattr(args, "workers", None) is not None:
        changes["simulation.workers"] = args.workers
    if changes:
        try:
            cfg = cfg.replace(**changes)
        except KeyError as exc:
            raise ConfigError(f"unknown field {exc.args[0]!r}") from exc
    return cfg


def _parse_values(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad value list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phaseqrng", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_args(p, frames=True):
        p.add_argument("config", nargs="?", help="scenario YAML (default: built-in reference scenario)")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a field by dotted path, e.g. mzi.delay=2.5e-10")
        p.add_argument("--seed", type=int, help="master seed")
        if frames:
            p.add_argument("--frames", type=int, help="number of frames")
            p.add_argument("--frame-length", type=int, help="samples per frame")
            p.add_argument("--workers", type=int, help="worker threads")

    p = sub.add_parser("validate", help="check the timing conditions of a scenario")
    scenario_args(p, frames=False)

    p = sub.add_parser("run", help="simulate, extract and analyze; write artifacts")
    scenario_args(p)
    p.add_argument("-o", "--output", required=True, help="output directory")

    p = sub.add_parser("sweep", help="repeat the pipeline over parameter values")
    scenario_args(p)
    p.add_argument("--parameter", required=True, help=f"one of {', '.join(SWEEP_PARAMETERS)}")
    p.add_argument("--values", required=True, type=_parse_values, help="comma-separated values")
    p.add_argument("-o", "--output", help="CSV file for the aggregated results")

    p = sub.add_parser("analyze", help="run the test battery on an existing raw file")
    p.add_argument("raw", help="packed raw bit file")
    p.add_argument("--length", type=int, help="bit length (default: sidecar, else 8 x bytes)")
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--max-lag", type=int, default=100)
    p.add_argument("-o", "--output", help="directory for report.yaml and autocorr.csv")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "analyze":
            code, _ = cmd_analyze(args.raw, args.alpha, args.max_lag, args.length, args.output)
            return code
        cfg = _load_config(args)
        if args.command == "validate":
            return cmd_validate(cfg)
        if args.command == "run":
            cmd_run(cfg, args.output)
            return EXIT_OK
        if args.command == "sweep":
            if args.parameter not in SWEEP_PARAMETERS:
                parser.error(f"unknown sweep parameter {args.parameter!r}; "
                             f"choose from {', '.join(SWEEP_PARAMETERS)}")
            cmd_sweep(cfg, args.parameter, args.values, args.output)
            return EXIT_OK
    except (ConfigError, InvalidParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
