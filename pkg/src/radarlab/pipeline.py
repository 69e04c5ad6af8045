"""End-to-end chain: motion -> I/Q -> DC estimate -> demodulation -> spectra.

Amplitude imbalance between I and Q is assumed to be compensated before DC
estimation; the circle model is only exact for ``amp_i == amp_q``.
"""
from dataclasses import dataclass, field
import enum
import logging
from typing import Optional, Union

import numpy as np

from . import analysis
from .dc_estimation import CircleFit, GdConfig, fit_circle, remove_dc
from .demod import DemodMethod, demodulate
from .digital_if import IfParams, ddc_fs4, if_modulate
from .errors import DegenerateGeometryError, DomainError, RadarLabError, StageError
from .motion import (MotionTrace, PendulumSpec, SinusoidSpec, damped_pendulum_trace,
                     pendulum_frequency, sinusoid_trace)
from .radar_model import RadarParams, synthesize_iq

logger = logging.getLogger(__name__)


class SignalPath(str, enum.Enum):
    DIRECT_BASEBAND = "direct_baseband"
    DIGITAL_IF = "digital_if"


@dataclass(frozen=True)
class AnalysisConfig:
    search_band: tuple = analysis.DEFAULT_BAND
    noise_band: Optional[tuple] = None
    harmonic_count: int = 3


@dataclass(frozen=True)
class PipelineConfig:
    """Everything needed for one deterministic run.

    ``demod_method`` is ``"arctangent"``, ``"dacm"`` or ``"both"``; with
    ``"both"`` the segment spectra are computed from the DACM output.
    ``known_dc`` bypasses circle fitting and centers on the given offsets.
    """

    radar: RadarParams = field(default_factory=RadarParams)
    motion: Union[PendulumSpec, SinusoidSpec, MotionTrace] = field(default_factory=PendulumSpec)
    path: SignalPath = SignalPath.DIRECT_BASEBAND
    if_params: Optional[IfParams] = None
    gd: GdConfig = field(default_factory=GdConfig)
    duration: float = 120.0
    baseband_rate: float = 100.0
    n_segments: int = 5
    demod_method: str = "dacm"
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    known_dc: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "path", SignalPath(self.path))
        if self.demod_method not in ("arctangent", "dacm", "both"):
            raise DomainError(f"unknown demod_method {self.demod_method!r}")
        if self.path is SignalPath.DIGITAL_IF:
            ifp = self.if_params or IfParams()
            object.__setattr__(self, "if_params", ifp)
            if ifp.baseband_rate != self.baseband_rate:
                raise DomainError(f"baseband_rate {self.baseband_rate} Hz differs from the IF chain's "
                                  f"output rate {ifp.baseband_rate} Hz")
        if not self.duration > 0 or not self.baseband_rate > 0:
            raise DomainError("duration and baseband_rate must be positive")
        if int(self.n_segments) < 1:
            raise DomainError("n_segments must be at least 1")

    @property
    def methods(self):
        if self.demod_method == "both":
            return [DemodMethod.DACM, DemodMethod.ARCTANGENT]
        return [DemodMethod(self.demod_method)]


@dataclass(frozen=True)
class TruthMetrics:
    rms_error: float
    amplitude_errors: tuple
    freq_error: float


@dataclass(frozen=True, eq=False)
class PipelineReport:
    circle_fit: CircleFit
    displacement: dict
    segments: list
    truth_metrics: dict
    envelope: Optional[analysis.EnvelopeFit]
    iq: object
    truth: MotionTrace
    truth_freq: Optional[float]

    @property
    def primary(self):
        return next(iter(self.displacement.values()))


def make_motion(cfg):
    """Ground-truth trace and its nominal frequency (None when unknown)."""
    m = cfg.motion
    if isinstance(m, PendulumSpec):
        return damped_pendulum_trace(m, cfg.duration, cfg.baseband_rate), pendulum_frequency(m)
    if isinstance(m, SinusoidSpec):
        return sinusoid_trace(m.amplitude, m.freq, m.phase, cfg.duration, cfg.baseband_rate), m.freq
    if isinstance(m, MotionTrace):
        if m.sample_rate != cfg.baseband_rate:
            raise DomainError(f"trace rate {m.sample_rate} Hz differs from baseband_rate {cfg.baseband_rate} Hz")
        return m, None
    raise DomainError(f"unsupported motion description {type(m).__name__}")


def synthesize(cfg, motion):
    """I/Q record for ``motion`` along the configured path, transients removed."""
    if cfg.path is SignalPath.DIGITAL_IF:
        iq = ddc_fs4(if_modulate(motion, cfg.radar, cfg.if_params), cfg.if_params)
        k = iq.transient_samples
        return iq.trimmed(), MotionTrace(motion.sample_rate, motion.displacements[k:len(motion) - k],
                                         motion.start_time + k / motion.sample_rate)
    return synthesize_iq(motion, cfg.radar), motion


def estimate_dc(cfg, iq):
    if cfg.known_dc is not None:
        ci, cq = (float(v) for v in cfg.known_dc)
        d = np.hypot(iq.i_samples - ci, iq.q_samples - cq)
        r = float(d.mean())
        return CircleFit(ci, cq, r, float(np.sqrt(np.mean((d - r) ** 2))), 0, True, float("nan"))
    try:
        fit = fit_circle(iq, cfg.gd)
    except DegenerateGeometryError as exc:
        # no usable arc (e.g. a static target): leave the record uncentered
        logger.warning("constellation is degenerate (%s); skipping DC removal", exc)
        d = np.hypot(iq.i_samples, iq.q_samples)
        return CircleFit(0.0, 0.0, float(d.mean()), float("nan"), 0, False, 0.0)
    if fit.short_arc:
        logger.warning("constellation arc covers only %.2f degrees; DC estimate is ill-conditioned",
                       fit.arc_coverage_deg)
    return fit


def _rms(v):
    return float(np.sqrt(np.mean(np.square(v))))


def truth_metrics(est, truth, truth_segments, segments, truth_freq):
    x = est.displacements - est.displacements.mean()
    x0 = truth.displacements - truth.displacements.mean()
    amp_err = tuple(float(s.peak_amplitude / t.peak_amplitude - 1.0) if not t.undefined else float("nan")
                    for s, t in zip(segments, truth_segments))
    if truth_freq is None:
        ref = np.array([t.peak_freq for t in truth_segments])
    else:
        ref = np.full(len(segments), truth_freq)
    got = np.array([s.peak_freq for s in segments])
    diff = np.abs(got - ref)
    return TruthMetrics(_rms(x - x0), amp_err, float(diff.max()) if np.all(np.isfinite(diff)) else float("nan"))


def _stage(name, fn, *args):
    try:
        return fn(*args)
    except RadarLabError as exc:
        raise StageError(name, exc) from exc


def run_pipeline(cfg):
    """Run the configured chain and compare against the generated ground truth."""
    motion, truth_freq = _stage("motion", make_motion, cfg)
    iq, truth = _stage("synthesis", synthesize, cfg, motion)
    fit = _stage("dc_estimation", estimate_dc, cfg, iq)
    centered = remove_dc(iq, fit)
    lam = cfg.radar.wavelength
    estimates = {}
    for method in cfg.methods:
        est = _stage("demodulation", demodulate, centered, lam, method)
        if est.suspect_steps.size:
            logger.warning("%s: %d samples with phase steps of pi/2 or more", method.value,
                           est.suspect_steps.size)
        estimates[method.value] = est
    a = cfg.analysis
    seg_args = (cfg.n_segments, a.search_band, a.noise_band, a.harmonic_count)
    primary = next(iter(estimates.values()))
    segments = _stage("analysis", analysis.segment_analysis, primary, *seg_args)
    truth_segments = _stage("analysis", analysis.segment_analysis, truth, *seg_args)
    metrics = {name: truth_metrics(est, truth, truth_segments,
                                   segments if est is primary else analysis.segment_analysis(est, *seg_args),
                                   truth_freq)
               for name, est in estimates.items()}
    envelope = None
    if len(segments) >= 2 and all(s.peak_amplitude > 0 for s in segments):
        envelope = analysis.fit_envelope(segments)
    return PipelineReport(fit, estimates, segments, metrics, envelope, iq, truth, truth_freq)
