"""Desk-scale digital-IF receive path.

The Doppler phase rides on an IF carrier at exactly a quarter of the IF
sampling rate, so quadrature extraction reduces to multiplying by the
sequences [1, 0, -1, 0] (I) and [0, -1, 0, 1] (Q).  Both rails are low-pass
filtered by a Hamming-windowed linear-phase FIR, decimated to the baseband
rate, and scaled by 2 so a unit-amplitude tone of phase phi comes out as
(cos phi, sin phi).

Timing convention: baseband sample j of a motion trace is held constant over
the D IF samples centered on it (D = decimation), and the down-converter
reads its output at the center of each such block.  A record produced by
:func:`if_modulate` therefore starts ``(D // 2) / if_sample_rate`` seconds
before the motion trace, and :func:`ddc_fs4` maps it back onto the motion's
timebase.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy import signal

from . import _kernels
from .errors import DomainError
from .radar_model import IQRecord, displacement_to_phase


@dataclass(frozen=True)
class IfParams:
    """IF, sampling, and filter settings (defaults: 10 kHz IF at 40 kS/s, 100 Hz out)."""

    if_freq: float = 10_000.0
    if_sample_rate: float = 40_000.0
    decimation: int = 400
    signal_amp: float = 1.0
    clutter_amp: float = 0.0
    clutter_phase: float = 0.0
    lpf_taps: int = 129
    lpf_cutoff: float = 40.0

    def __post_init__(self):
        if not self.if_sample_rate > 0:
            raise DomainError("if_sample_rate must be positive")
        if self.if_freq * 4 != self.if_sample_rate:
            raise DomainError(f"if_freq must equal if_sample_rate/4 exactly, got {self.if_freq} "
                              f"for rate {self.if_sample_rate}")
        if int(self.decimation) != self.decimation or self.decimation < 1:
            raise DomainError("decimation must be a positive integer")
        if self.if_sample_rate / self.decimation != int(self.if_sample_rate / self.decimation):
            raise DomainError("if_sample_rate/decimation must be an integer rate")
        if int(self.lpf_taps) != self.lpf_taps or self.lpf_taps < 1:
            raise DomainError("lpf_taps must be a positive integer")
        if not 0 < self.lpf_cutoff < self.baseband_rate / 2:
            raise DomainError(f"lpf_cutoff must lie in (0, {self.baseband_rate / 2}) Hz")
        if self.signal_amp < 0 or self.clutter_amp < 0:
            raise DomainError("signal_amp and clutter_amp must be non-negative")

    @property
    def baseband_rate(self):
        return self.if_sample_rate / self.decimation

    @property
    def transient_samples(self):
        return math.ceil(self.lpf_taps / (2 * self.decimation))

    def lowpass_taps(self):
        return design_lowpass(self.lpf_taps, self.lpf_cutoff, self.if_sample_rate)

    def equivalent_dc(self):
        """Constant baseband offset produced by the stationary clutter return."""
        return (self.clutter_amp * math.cos(self.clutter_phase),
                self.clutter_amp * math.sin(self.clutter_phase))


@dataclass(frozen=True, eq=False)
class IfRecord:
    """Real IF samples at ``sample_rate``."""

    sample_rate: float
    samples: np.ndarray
    start_time: float = 0.0

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64).reshape(-1)
        object.__setattr__(self, "samples", s)
        if not self.sample_rate > 0:
            raise DomainError("sample_rate must be positive")
        if s.size == 0:
            raise DomainError("IF record is empty")

    def __len__(self):
        return self.samples.size

    def __add__(self, other):
        if other.sample_rate != self.sample_rate or len(other) != len(self):
            raise DomainError("IF records must share rate and length to be added")
        return IfRecord(self.sample_rate, self.samples + other.samples, self.start_time)


def design_lowpass(n_taps, cutoff, sample_rate):
    """Hamming-windowed sinc low-pass with unit DC gain."""
    return signal.firwin(int(n_taps), cutoff, window="hamming", fs=sample_rate)


def _carrier_phase(n):
    # exact pi/2 * (m mod 4): avoids precision loss of 2*pi*f*t at large m
    return 0.5 * np.pi * (np.arange(n) % 4)


def if_modulate(motion, radar, ifp):
    """IF samples of the Doppler return plus a stationary clutter return.

    ``s[m] = signal_amp*cos(w m + theta0 + 4 pi x~/lambda + dphi~)
    + clutter_amp*cos(w m + clutter_phase) + noise`` with w = pi/2 per sample
    and ``x~``, ``dphi~`` held over each baseband interval.  ``radar.noise_std``
    is rescaled at IF so that each baseband output rail ends up with that std;
    ``radar.amp_i/amp_q/dc_i/dc_q`` are not used on this path.
    """
    D = int(ifp.decimation)
    if not math.isclose(motion.sample_rate, ifp.baseband_rate, rel_tol=1e-12):
        raise DomainError(f"motion rate {motion.sample_rate} Hz does not match the IF baseband "
                          f"rate {ifp.baseband_rate} Hz")
    n = len(motion)
    n_if = n * D
    rng = radar.rng()
    phase_noise = radar.phase_noise_std * rng.standard_normal(n)
    phase = radar.theta0 + displacement_to_phase(motion.displacements, radar.wavelength) + phase_noise
    held = np.repeat(phase, D)
    carrier = _carrier_phase(n_if)
    s = ifp.signal_amp * np.cos(carrier + held)
    if ifp.clutter_amp:
        s += ifp.clutter_amp * np.cos(carrier + ifp.clutter_phase)
    if radar.noise_std:
        h = ifp.lowpass_taps()
        s += radar.noise_std / math.sqrt(2.0 * np.dot(h, h)) * rng.standard_normal(n_if)
    start = motion.start_time - (D // 2) / ifp.if_sample_rate
    return IfRecord(ifp.if_sample_rate, s, start)


def ddc_fs4(record, ifp):
    """Quadrature down-conversion, low-pass filtering and decimation to baseband.

    Output sample j is read at IF index ``j*D + D//2`` after compensating the
    filter's group delay; the first and last ``ceil(lpf_taps/(2*D))`` outputs
    are flagged as transients in ``IQRecord.transient_samples``.
    """
    if ifp.if_freq * 4 != ifp.if_sample_rate:
        raise DomainError("fs/4 relation violated")
    if not math.isclose(record.sample_rate, ifp.if_sample_rate, rel_tol=1e-12):
        raise DomainError(f"record rate {record.sample_rate} Hz differs from if_sample_rate "
                          f"{ifp.if_sample_rate} Hz")
    taps = ifp.lowpass_taps()
    if len(record) < taps.size:
        raise DomainError(f"record of {len(record)} samples is shorter than the {taps.size}-tap filter")
    D = int(ifp.decimation)
    n_out = len(record) // D
    if n_out < 1:
        raise DomainError("record shorter than one decimation block")
    m = np.arange(len(record)) % 4
    lo_i = np.array([1.0, 0.0, -1.0, 0.0])[m]
    lo_q = np.array([0.0, -1.0, 0.0, 1.0])[m]
    s = record.samples
    first = D // 2
    i = 2.0 * _kernels.fir_decimate(np.ascontiguousarray(s * lo_i), taps, first, D, n_out)
    q = 2.0 * _kernels.fir_decimate(np.ascontiguousarray(s * lo_q), taps, first, D, n_out)
    return IQRecord(ifp.baseband_rate, i, q, record.start_time + first / ifp.if_sample_rate,
                    transient_samples=min(ifp.transient_samples, n_out // 2))
