"""Command-line front end for the CW radar simulation and recovery chain.

    radarlab <synth|ddc|fitdc|demod|analyze|pipeline> --config FILE --out DIR
             [--seed N] [--method arctangent|dacm|both] [--input FILE]

Each command writes its data files (CSV), a JSON summary, and finally a
``<command>.manifest.json`` listing every emitted file.  Exit status is 0 on
success, 1 for runtime or data errors, 2 for usage or configuration errors.
"""
import argparse
import dataclasses
import logging
from pathlib import Path
import sys

import numpy as np

from . import __version__, _kernels, analysis
from .config import bundled_configs, load_config
from .dc_estimation import remove_dc
from .demod import DemodMethod, demodulate
from .digital_if import IfParams, ddc_fs4, if_modulate
from .errors import ConfigError, RadarLabError, StageError
from .motion import MotionTrace
from .io import (read_if_csv, read_iq_csv, read_trace_csv, write_displacement_csv, write_if_csv,
                 write_iq_csv, write_json, write_spectrum_csv)
from .pipeline import PipelineConfig, SignalPath, estimate_dc, make_motion, run_pipeline, synthesize

logger = logging.getLogger("radarlab")

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


class Run:
    """Collects emitted files for the manifest."""

    def __init__(self, command, args, cfg=None):
        self.command = command
        self.args = args
        self.out = Path(args.out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.cfg = cfg
        self.files = []

    def path(self, name, role):
        self.files.append({"path": name, "role": role})
        return self.out / name

    def finish(self, summary):
        write_json(self.path(f"{self.command}_summary.json", "summary"), summary)
        manifest = {
            "command": self.command,
            "config_path": self.args.config,
            "output_dir": str(self.args.out),
            "emitted_files": self.files,
            "tool_version": __version__,
            "kernel_backend": _kernels.BACKEND,
            "seed": self.cfg.radar.rng_seed if self.cfg is not None else None,
        }
        write_json(self.out / f"{self.command}.manifest.json", manifest)


def _config(args, required=True):
    if args.config is None:
        if required:
            raise ConfigError(f"{args.command} requires --config")
        return None
    return load_config(args.config, seed=args.seed)


def _fit_dict(fit):
    return {
        "center_i": fit.center_i, "center_q": fit.center_q, "radius": fit.radius,
        "residual_rms": fit.residual_rms, "iterations": fit.iterations, "converged": fit.converged,
        "arc_coverage_deg": fit.arc_coverage_deg, "short_arc": fit.short_arc,
    }


def _segment_dict(rep):
    return {
        "segment_index": rep.segment_index,
        "start_time_s": rep.start_time,
        "duration_s": rep.duration,
        "peak_freq_hz": rep.peak_freq,
        "peak_amplitude_m": rep.peak_amplitude,
        "half_peak_to_peak_m": rep.half_peak_to_peak,
        "snr_db": rep.snr_db,
        "harmonic_levels_db": list(rep.harmonic_levels_db),
        "undefined": rep.undefined,
    }


def _print_segments(reports):
    print("segment  start_s  peak_hz   amplitude_um  snr_db  harmonics_db")
    for r in reports:
        harm = " ".join(f"{v:7.1f}" for v in r.harmonic_levels_db)
        print(f"{r.segment_index:7d}  {r.start_time:7.1f}  {r.peak_freq:7.4f}  {r.peak_amplitude * 1e6:12.3f}"
              f"  {r.snr_db:6.2f}  {harm}")


def _default_input(run, explicit, candidates):
    if explicit:
        return Path(explicit)
    for name in candidates:
        if (run.out / name).is_file():
            return run.out / name
    return run.out / candidates[0]


def cmd_synth(args):
    cfg = _config(args)
    run = Run("synth", args, cfg)
    motion, freq = make_motion(cfg)
    iq, truth = synthesize(cfg, motion)
    write_iq_csv(run.path("iq.csv", "iq"), iq)
    write_displacement_csv(run.path("truth.csv", "truth"), truth)
    print(f"synthesized {len(iq)} I/Q samples at {iq.sample_rate:g} Hz via {cfg.path.value}")
    run.finish({"samples": len(iq), "sample_rate_hz": iq.sample_rate, "path": cfg.path.value,
                "wavelength_m": cfg.radar.wavelength, "nominal_freq_hz": freq})


def cmd_ddc(args):
    cfg = _config(args)
    ifp = cfg.if_params or IfParams()
    run = Run("ddc", args, cfg)
    summary = {}
    if args.input:
        record = read_if_csv(args.input)
    else:
        motion, _ = make_motion(dataclasses.replace(cfg, path=SignalPath.DIGITAL_IF, if_params=ifp,
                                                    baseband_rate=ifp.baseband_rate))
        record = if_modulate(motion, cfg.radar, ifp)
        if args.write_if:
            write_if_csv(run.path("if.csv", "if"), record)
        k = ifp.transient_samples
        truth = MotionTrace(motion.sample_rate, motion.displacements[k:len(motion) - k],
                            motion.start_time + k / motion.sample_rate)
        write_displacement_csv(run.path("truth.csv", "truth"), truth)
    iq = ddc_fs4(record, ifp)
    summary["transient_samples_removed_per_end"] = iq.transient_samples
    iq = iq.trimmed()
    write_iq_csv(run.path("iq.csv", "iq"), iq)
    print(f"down-converted {len(record)} IF samples at {record.sample_rate:g} Hz to "
          f"{len(iq)} I/Q samples at {iq.sample_rate:g} Hz")
    summary.update({"if_samples": len(record), "samples": len(iq), "sample_rate_hz": iq.sample_rate})
    run.finish(summary)


def cmd_fitdc(args):
    cfg = _config(args, required=False) or PipelineConfig()
    run = Run("fitdc", args, cfg if args.config else None)
    iq = read_iq_csv(_default_input(run, args.input, ["iq.csv"]))
    fit = estimate_dc(cfg, iq)
    write_iq_csv(run.path("iq_centered.csv", "iq_centered"), remove_dc(iq, fit))
    write_json(run.path("circle_fit.json", "circle_fit"), _fit_dict(fit))
    print(f"DC offset ({fit.center_i:.6g}, {fit.center_q:.6g}), radius {fit.radius:.6g}, "
          f"residual {fit.residual_rms:.3g}, {fit.iterations} iterations, converged={fit.converged}, "
          f"arc {fit.arc_coverage_deg:.1f} deg")
    run.finish(_fit_dict(fit))


def cmd_demod(args):
    cfg = _config(args, required=False) or PipelineConfig()
    run = Run("demod", args, cfg if args.config else None)
    iq = read_iq_csv(_default_input(run, args.input, ["iq_centered.csv"]))
    method = args.method or cfg.demod_method
    methods = [DemodMethod.DACM, DemodMethod.ARCTANGENT] if method == "both" else [DemodMethod(method)]
    lam = cfg.radar.wavelength
    summary = {"wavelength_m": lam, "samples": len(iq), "methods": {}}
    ests = {}
    for m in methods:
        est = demodulate(iq, lam, m)
        ests[m.value] = est
        write_displacement_csv(run.path(f"displacement_{m.value}.csv", f"displacement_{m.value}"), est)
        x = est.displacements
        summary["methods"][m.value] = {"peak_to_peak_m": float(x.max() - x.min()),
                                       "suspect_steps": int(est.suspect_steps.size)}
        print(f"{m.value}: peak-to-peak {float(x.max() - x.min()) * 1e6:.3f} um, "
              f"{est.suspect_steps.size} suspect steps")
    if len(ests) == 2:
        a = ests["arctangent"].displacements
        d = ests["dacm"].displacements
        diff = float(np.sqrt(np.mean(((a - a.mean()) - (d - d.mean())) ** 2)))
        summary["cross_method_rms_difference_m"] = diff
        print(f"cross-method RMS difference: {diff:.3e} m")
    run.finish(summary)


def cmd_analyze(args):
    cfg = _config(args, required=False) or PipelineConfig()
    run = Run("analyze", args, cfg if args.config else None)
    path = _default_input(run, args.input, ["displacement_dacm.csv", "displacement_arctangent.csv"])
    est = read_trace_csv(path)
    a = cfg.analysis
    reports = analysis.segment_analysis(est, cfg.n_segments, a.search_band, a.noise_band, a.harmonic_count)
    for r in reports:
        write_spectrum_csv(run.path(f"spectrum_seg{r.segment_index}.csv", "spectrum"), r)
    _print_segments(reports)
    run.finish({"input": str(path), "segments": [_segment_dict(r) for r in reports]})


def cmd_pipeline(args):
    cfg = _config(args)
    if args.method:
        cfg = dataclasses.replace(cfg, demod_method=args.method)
    run = Run("pipeline", args, cfg)
    rep = run_pipeline(cfg)
    write_iq_csv(run.path("iq.csv", "iq"), rep.iq)
    write_displacement_csv(run.path("truth.csv", "truth"), rep.truth)
    write_json(run.path("circle_fit.json", "circle_fit"), _fit_dict(rep.circle_fit))
    for name, est in rep.displacement.items():
        write_displacement_csv(run.path(f"displacement_{name}.csv", f"displacement_{name}"), est)
    for r in rep.segments:
        write_spectrum_csv(run.path(f"spectrum_seg{r.segment_index}.csv", "spectrum"), r)
    fit = rep.circle_fit
    print(f"DC offset ({fit.center_i:.6g}, {fit.center_q:.6g}), radius {fit.radius:.6g}, "
          f"converged={fit.converged}, arc {fit.arc_coverage_deg:.1f} deg")
    _print_segments(rep.segments)
    if rep.envelope is not None:
        print(f"envelope fit: {rep.envelope.initial_amplitude * 1e6:.2f} um -> "
              f"{rep.envelope.final_amplitude * 1e6:.2f} um, tau {rep.envelope.decay_time:.2f} s")
    metrics = {name: {"rms_error_m": m.rms_error, "amplitude_errors": list(m.amplitude_errors),
                      "freq_error_hz": m.freq_error} for name, m in rep.truth_metrics.items()}
    for name, m in rep.truth_metrics.items():
        print(f"{name}: RMS error vs truth {m.rms_error * 1e6:.3f} um, max freq error {m.freq_error:.4f} Hz")
    env = rep.envelope
    run.finish({
        "path": cfg.path.value,
        "demod_method": cfg.demod_method,
        "wavelength_m": cfg.radar.wavelength,
        "nominal_freq_hz": rep.truth_freq,
        "circle_fit": _fit_dict(fit),
        "segments": [_segment_dict(r) for r in rep.segments],
        "envelope": None if env is None else {
            "initial_amplitude_m": env.initial_amplitude, "final_amplitude_m": env.final_amplitude,
            "decay_time_s": env.decay_time, "start_time_s": env.start_time, "end_time_s": env.end_time},
        "truth_metrics": metrics,
        "suspect_steps": {n: int(e.suspect_steps.size) for n, e in rep.displacement.items()},
    })


COMMANDS = {
    "synth": cmd_synth,
    "ddc": cmd_ddc,
    "fitdc": cmd_fitdc,
    "demod": cmd_demod,
    "analyze": cmd_analyze,
    "pipeline": cmd_pipeline,
}


HELP = {
    "synth": "synthesize baseband I/Q and the ground-truth motion",
    "ddc": "digital-IF path: modulate (or read) IF samples and down-convert",
    "fitdc": "fit the constellation circle and remove the DC offset",
    "demod": "recover displacement from centered I/Q",
    "analyze": "segment spectra, SNR and harmonic levels",
    "pipeline": "run every stage and compare against ground truth",
}


def build_parser():
    parser = argparse.ArgumentParser(prog="radarlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"radarlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=HELP[name])
        p.add_argument("--config", help="JSON config file or bundled name "
                                        f"({', '.join(bundled_configs())})")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, help="override radar.rng_seed")
        p.add_argument("--method", choices=["arctangent", "dacm", "both"],
                       help="demodulator (overrides demod_method)")
        p.add_argument("--input", help="input file (defaults to the previous stage's output in --out)")
        if name == "ddc":
            p.add_argument("--write-if", action="store_true", help="also write the IF samples to if.csv")
    return parser


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"radarlab: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StageError as exc:
        print(f"radarlab: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except RadarLabError as exc:
        print(f"radarlab: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"radarlab: I/O error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
