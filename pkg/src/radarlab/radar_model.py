"""Radar configuration and ideal quadrature baseband synthesis.

A target at displacement x(t) modulates the phase of the reflected carrier by
4*pi*x/lambda; the quadrature receiver outputs

    I = A_I cos(theta0 + 4*pi*x/lambda + dphi) + DC_I + w_I
    Q = A_Q sin(theta0 + 4*pi*x/lambda + dphi) + DC_Q + w_Q

Random draws use numpy's PCG64 generator seeded with ``rng_seed``; for a
record of n samples the stream is consumed as n residual-phase draws, then n
I-channel draws, then n Q-channel draws (always, even when a std is zero).
"""
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

SPEED_OF_LIGHT = 299_792_458.0


def wavelength_of(carrier_freq):
    """Free-space wavelength c / f in meters."""
    if not carrier_freq > 0:
        raise DomainError(f"carrier frequency must be positive, got {carrier_freq}")
    return SPEED_OF_LIGHT / carrier_freq


def displacement_to_phase(x, wavelength):
    """Round-trip Doppler phase 4*pi*x/lambda in radians."""
    if not wavelength > 0:
        raise DomainError(f"wavelength must be positive, got {wavelength}")
    return 4.0 * np.pi * np.asarray(x, dtype=float) / wavelength


@dataclass(frozen=True)
class RadarParams:
    """Carrier and receiver-output model parameters.

    The initial-distance phase is folded into ``theta0``.  Amplitudes and
    offsets are constants; noise stds are per channel (``noise_std``) and on
    the residual phase (``phase_noise_std``, radians).
    """

    carrier_freq: float = 60e9
    theta0: float = 0.0
    amp_i: float = 1.0
    amp_q: float = 1.0
    dc_i: float = 0.0
    dc_q: float = 0.0
    noise_std: float = 0.0
    phase_noise_std: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if not self.carrier_freq > 0:
            raise DomainError(f"carrier_freq must be positive, got {self.carrier_freq}")
        if not (self.amp_i > 0 and self.amp_q > 0):
            raise DomainError("amp_i and amp_q must be positive")
        if not (self.noise_std >= 0 and self.phase_noise_std >= 0):
            raise DomainError("noise stds must be non-negative")

    @property
    def wavelength(self):
        return wavelength_of(self.carrier_freq)

    def rng(self):
        return np.random.Generator(np.random.PCG64(self.rng_seed))


@dataclass(frozen=True, eq=False)
class IQRecord:
    """Baseband I/Q samples at a uniform rate.

    ``transient_samples`` marks how many samples at each end are filter
    transients (zero for directly synthesized records).
    """

    sample_rate: float
    i_samples: np.ndarray
    q_samples: np.ndarray
    start_time: float = 0.0
    transient_samples: int = 0

    def __post_init__(self):
        i = np.asarray(self.i_samples, dtype=np.float64).reshape(-1)
        q = np.asarray(self.q_samples, dtype=np.float64).reshape(-1)
        object.__setattr__(self, "i_samples", i)
        object.__setattr__(self, "q_samples", q)
        if not self.sample_rate > 0:
            raise DomainError(f"sample_rate must be positive, got {self.sample_rate}")
        if i.size == 0 or i.size != q.size:
            raise DomainError(f"I and Q must have equal nonzero length, got {i.size} and {q.size}")

    def __len__(self):
        return self.i_samples.size

    @property
    def times(self):
        return self.start_time + np.arange(len(self)) / self.sample_rate

    def trimmed(self):
        """Copy without the flagged transient samples."""
        k = self.transient_samples
        if k == 0:
            return self
        if 2 * k >= len(self):
            raise DomainError("record is shorter than its transient margins")
        return IQRecord(self.sample_rate, self.i_samples[k:-k], self.q_samples[k:-k],
                        self.start_time + k / self.sample_rate)


def synthesize_iq(motion, params):
    """Noisy quadrature baseband for ``motion`` as seen by the radar ``params``."""
    n = len(motion)
    if n == 0:
        raise DomainError("motion trace is empty")
    rng = params.rng()
    draws = rng.standard_normal((3, n))
    phase = params.theta0 + displacement_to_phase(motion.displacements, params.wavelength)
    phase = phase + params.phase_noise_std * draws[0]
    i = params.amp_i * np.cos(phase) + params.dc_i + params.noise_std * draws[1]
    q = params.amp_q * np.sin(phase) + params.dc_q + params.noise_std * draws[2]
    return IQRecord(motion.sample_rate, i, q, motion.start_time)
