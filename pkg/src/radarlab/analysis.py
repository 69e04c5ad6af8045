"""Amplitude spectra, SNR, harmonic levels and per-segment reports.

Spectra are one-sided, Hann-windowed (periodic form, coherent gain 0.5) and
scaled so a sinusoid of amplitude A centered on a bin reads A.  Peaks are
refined by fitting a parabola to the log-amplitude of the three bins around
the maximum.

SNR is an operational definition: power summed over the 5 bins nearest the
fundamental, divided by 5 times the median per-bin power of the noise band
(with +-2 bins around the fundamental and its next three harmonics removed).
"""
from dataclasses import dataclass, field, replace
import math

import numpy as np

from .errors import DomainError

COHERENT_GAIN = 0.5
SIGNAL_HALF_WIDTH = 2
MIN_NOISE_BINS = 8
DEFAULT_BAND = (0.5, 10.0)


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    """Spectrum of one record or segment.

    ``undefined`` is set for an all-zero input, in which case the peak, SNR
    and harmonic fields are NaN.  ``half_peak_to_peak`` is a time-domain
    amplitude reading of the same samples, kept alongside the spectral one.
    """

    bin_freqs: np.ndarray
    amplitude: np.ndarray
    peak_freq: float
    peak_amplitude: float
    sample_rate: float
    n_samples: int
    start_time: float = 0.0
    snr_db: float = float("nan")
    harmonic_levels_db: np.ndarray = field(default_factory=lambda: np.zeros(0))
    segment_index: int = 0
    undefined: bool = False
    half_peak_to_peak: float = float("nan")

    @property
    def bin_width(self):
        return self.sample_rate / self.n_samples

    @property
    def duration(self):
        return self.n_samples / self.sample_rate

    @property
    def center_time(self):
        return self.start_time + 0.5 * self.duration


def hann(n):
    """Periodic Hann window of length n."""
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


def parseval_terms(x):
    """(one-sided spectral power / N, time-domain power) of the Hann-windowed, mean-removed x.

    The two agree to rounding; used to check the spectral normalization.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    xw = (x - x.mean()) * hann(n)
    p = np.abs(np.fft.rfft(xw)) ** 2
    p[1:(n + 1) // 2] *= 2.0
    return p.sum() / n, np.dot(xw, xw)


def hann_response(delta):
    """Hann amplitude response at ``delta`` bins from a tone, relative to its center value."""
    delta = np.asarray(delta, dtype=float)
    return np.sinc(delta) / (1.0 - delta * delta)


def _interp_peak(amp, k):
    """Fractional bin offset and amplitude of the tone whose peak bin is k.

    The offset comes from a parabola through the log amplitudes of bins
    k-1, k, k+1; the amplitude is the bin-k reading divided by the Hann
    response at that offset (the log parabola alone overshoots by up to 4%
    half-way between bins).
    """
    if k <= 0 or k >= amp.size - 1:
        return 0.0, float(amp[k])
    trio = amp[k - 1:k + 2]
    if np.any(trio <= 0):
        return 0.0, float(amp[k])
    a, b, c = np.log(trio)
    denom = a - 2.0 * b + c
    if denom >= 0:
        return 0.0, float(amp[k])
    p = float(np.clip(0.5 * (a - c) / denom, -0.5, 0.5))
    return p, float(amp[k] / hann_response(p))


def _band(band, fs):
    lo, hi = (float(v) for v in band)
    if not (0 <= lo < hi):
        raise DomainError(f"invalid band {band}")
    if hi > fs / 2:
        raise DomainError(f"band upper edge {hi} Hz exceeds Nyquist {fs / 2} Hz")
    return lo, hi


def spectrum(est, search_band=DEFAULT_BAND, segment_index=0):
    """One-sided amplitude spectrum with the interpolated peak inside ``search_band``.

    Requires at least two periods of the band's lower edge in the record.
    """
    x = np.asarray(est.displacements, dtype=float)
    fs = float(est.sample_rate)
    n = x.size
    lo, hi = _band(search_band, fs)
    if n < 4 or (lo > 0 and n / fs < 2.0 / lo):
        raise DomainError(f"record of {n} samples ({n / fs:.3g} s) is too short for a band starting at {lo} Hz")
    x = x - x.mean()
    xw = x * hann(n)
    amp = np.abs(np.fft.rfft(xw)) * (2.0 / (n * COHERENT_GAIN))
    freqs = np.fft.rfftfreq(n, 1.0 / fs)
    hp2p = 0.5 * (x.max() - x.min())
    start = getattr(est, "start_time", 0.0)
    if not np.any(amp > 0):
        return SpectrumReport(freqs, amp, math.nan, math.nan, fs, n, start, math.nan,
                              np.zeros(0), segment_index, True, hp2p)
    in_band = np.flatnonzero((freqs >= lo) & (freqs <= hi))
    if in_band.size == 0:
        raise DomainError(f"no spectral bins inside {search_band}")
    k = int(in_band[np.argmax(amp[in_band])])
    p, peak_amp = _interp_peak(amp, k)
    # an edge-bin maximum may interpolate past the band; keep the estimate inside it
    peak_freq = min(max((k + p) * fs / n, lo), hi)
    return SpectrumReport(freqs, amp, peak_freq, peak_amp, fs, n, start,
                          segment_index=segment_index, half_peak_to_peak=hp2p)


def _signal_bins(pos, size):
    kc = int(round(pos))
    return np.arange(max(kc - SIGNAL_HALF_WIDTH, 0), min(kc + SIGNAL_HALF_WIDTH, size - 1) + 1)


def estimate_snr(report, fundamental, noise_band=DEFAULT_BAND):
    """Spectral SNR in dB of the tone at ``fundamental`` against the noise-band median floor."""
    lo, hi = _band(noise_band, report.sample_rate)
    if not lo <= fundamental <= hi:
        raise DomainError(f"fundamental {fundamental} Hz lies outside the noise band {noise_band}")
    if report.undefined:
        return math.nan
    power = report.amplitude ** 2
    freqs = report.bin_freqs
    pos = fundamental / report.bin_width
    sig = _signal_bins(pos, power.size)
    mask = (freqs >= lo) & (freqs <= hi)
    k = np.arange(power.size)
    for h in range(1, 5):
        mask &= np.abs(k - round(h * pos)) > SIGNAL_HALF_WIDTH
    noise = power[mask]
    if noise.size < MIN_NOISE_BINS:
        raise DomainError(f"noise band {noise_band} leaves only {noise.size} noise bins (need {MIN_NOISE_BINS})")
    floor = np.median(noise)
    total = power[sig].sum()
    if floor == 0:
        return math.inf if total > 0 else math.nan
    return 10.0 * math.log10(total / (floor * sig.size))


def harmonic_levels(report, fundamental, count=3):
    """Levels in dB of harmonics 2..count+1 relative to the report's peak amplitude."""
    if count < 1:
        raise DomainError("harmonic count must be at least 1")
    if not (count + 1) * fundamental < report.sample_rate / 2:
        raise DomainError(f"harmonic {count + 1} of {fundamental} Hz is above Nyquist")
    if report.undefined:
        return np.full(count, math.nan)
    amp = report.amplitude
    out = np.empty(count)
    for j, h in enumerate(range(2, count + 2)):
        kc = int(round(h * fundamental / report.bin_width))
        lo, hi = max(kc - 1, 0), min(kc + 1, amp.size - 1)
        k = lo + int(np.argmax(amp[lo:hi + 1]))
        _, a = _interp_peak(amp, k)
        out[j] = 20.0 * math.log10(a / report.peak_amplitude) if a > 0 else -math.inf
    return out


def analyze(est, search_band=DEFAULT_BAND, noise_band=None, harmonic_count=3, segment_index=0):
    """Spectrum plus SNR and harmonic levels taken at the interpolated peak."""
    rep = spectrum(est, search_band, segment_index)
    if rep.undefined:
        return replace(rep, harmonic_levels_db=np.full(harmonic_count, math.nan))
    nb = noise_band if noise_band is not None else search_band
    snr = estimate_snr(rep, rep.peak_freq, nb)
    levels = harmonic_levels(rep, rep.peak_freq, harmonic_count)
    return replace(rep, snr_db=snr, harmonic_levels_db=levels)


@dataclass(frozen=True, eq=False)
class _Segment:
    sample_rate: float
    displacements: np.ndarray
    start_time: float


def segment_analysis(est, n_segments=5, search_band=DEFAULT_BAND, noise_band=None, harmonic_count=3):
    """Analyze ``n_segments`` equal, consecutive, non-overlapping segments.

    Trailing samples that do not fill a whole segment are dropped.
    """
    n_segments = int(n_segments)
    if n_segments < 1:
        raise DomainError("n_segments must be at least 1")
    x = np.asarray(est.displacements, dtype=float)
    seg_len = x.size // n_segments
    if seg_len < 4:
        raise DomainError(f"{x.size} samples cannot form {n_segments} segments")
    fs = est.sample_rate
    t0 = getattr(est, "start_time", 0.0)
    reports = []
    for s in range(n_segments):
        seg = _Segment(fs, x[s * seg_len:(s + 1) * seg_len], t0 + s * seg_len / fs)
        reports.append(analyze(seg, search_band, noise_band, harmonic_count, segment_index=s))
    return reports


@dataclass(frozen=True)
class EnvelopeFit:
    """Exponential envelope fitted through per-segment peak amplitudes."""

    initial_amplitude: float
    final_amplitude: float
    decay_time: float
    start_time: float
    end_time: float


def fit_envelope(reports):
    """Least-squares fit of log(peak amplitude) against segment center time.

    Returns the envelope evaluated at the start of the first segment and the
    end of the last one.
    """
    if len(reports) < 2:
        raise DomainError("need at least two segments to fit an envelope")
    t = np.array([r.center_time for r in reports])
    a = np.array([r.peak_amplitude for r in reports])
    if not np.all(a > 0):
        raise DomainError("segment amplitudes must be positive to fit an envelope")
    slope, intercept = np.polyfit(t, np.log(a), 1)
    t_start = reports[0].start_time
    t_end = reports[-1].start_time + reports[-1].duration
    tau = -1.0 / slope if slope < 0 else math.inf
    return EnvelopeFit(float(np.exp(intercept + slope * t_start)), float(np.exp(intercept + slope * t_end)),
                       float(tau), t_start, t_end)
