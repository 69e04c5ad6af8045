"""Ground-truth displacement traces.

The main generator is a lightly damped simple pendulum whose swing decays
exponentially, plus an undamped sinusoid used as a reference motion.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

STANDARD_GRAVITY = 9.80665


@dataclass(frozen=True, eq=False)
class MotionTrace:
    """Uniformly sampled displacement x(t) in meters."""

    sample_rate: float
    displacements: np.ndarray
    start_time: float = 0.0

    def __post_init__(self):
        x = np.asarray(self.displacements, dtype=np.float64).reshape(-1)
        object.__setattr__(self, "displacements", x)
        if not self.sample_rate > 0:
            raise DomainError(f"sample_rate must be positive, got {self.sample_rate}")
        if x.size == 0:
            raise DomainError("motion trace is empty")

    def __len__(self):
        return self.displacements.size

    @property
    def times(self):
        return self.start_time + np.arange(len(self)) / self.sample_rate


@dataclass(frozen=True)
class PendulumSpec:
    """Small-angle pendulum with an exponentially decaying swing.

    Attributes
    ----------
    arm_length : float
        Pivot to bob-center distance L in meters.
    initial_amplitude : float
        Swing amplitude at t = 0, meters.
    decay_time : float
        Time constant of the amplitude envelope, seconds.
    initial_phase : float
        Phase of the sine at t = 0, radians.
    gravity : float
        Gravitational acceleration, m/s^2.
    """

    arm_length: float = 0.06
    initial_amplitude: float = 129e-6
    decay_time: float = 113.95
    initial_phase: float = 0.0
    gravity: float = STANDARD_GRAVITY

    def __post_init__(self):
        for name in ("arm_length", "decay_time", "gravity"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")
        # zero amplitude is allowed and yields a static target
        if not self.initial_amplitude >= 0:
            raise DomainError(f"initial_amplitude must be non-negative, got {self.initial_amplitude}")


@dataclass(frozen=True)
class SinusoidSpec:
    """Undamped sinusoidal motion ``amplitude * sin(2*pi*freq*t + phase)``."""

    amplitude: float
    freq: float
    phase: float = 0.0


def pendulum_frequency(spec):
    """Small-angle oscillation frequency sqrt(g/L)/(2*pi), in hertz."""
    return np.sqrt(spec.gravity / spec.arm_length) / (2.0 * np.pi)


def decay_time_for(start_amplitude, end_amplitude, duration):
    """Exponential time constant taking ``start_amplitude`` to ``end_amplitude`` in ``duration``."""
    if not (start_amplitude > end_amplitude > 0) or not duration > 0:
        raise DomainError("need start_amplitude > end_amplitude > 0 and duration > 0")
    return duration / np.log(start_amplitude / end_amplitude)


def _n_samples(duration, sample_rate):
    if not duration > 0:
        raise DomainError(f"duration must be positive, got {duration}")
    if not sample_rate > 0:
        raise DomainError(f"sample_rate must be positive, got {sample_rate}")
    n = int(round(duration * sample_rate))
    if n < 1:
        raise DomainError("duration * sample_rate rounds to zero samples")
    return n


def damped_pendulum_trace(spec, duration, sample_rate):
    """Sample ``A0 * exp(-t/tau) * sin(2*pi*f*t + phi0)`` at ``t_n = n / sample_rate``."""
    n = _n_samples(duration, sample_rate)
    t = np.arange(n) / sample_rate
    f = pendulum_frequency(spec)
    x = spec.initial_amplitude * np.exp(-t / spec.decay_time) * np.sin(2.0 * np.pi * f * t + spec.initial_phase)
    return MotionTrace(sample_rate, x)


def pendulum_envelope(spec, t):
    """Amplitude envelope ``A0 * exp(-t/tau)`` of the damped pendulum."""
    return spec.initial_amplitude * np.exp(-np.asarray(t, dtype=float) / spec.decay_time)


def sinusoid_trace(amplitude, freq, phase, duration, sample_rate):
    """Sample ``amplitude * sin(2*pi*freq*t + phase)``; requires sample_rate > 2*freq."""
    if not sample_rate > 2.0 * abs(freq):
        raise DomainError(f"sample_rate {sample_rate} Hz does not exceed twice the frequency {freq} Hz")
    n = _n_samples(duration, sample_rate)
    t = np.arange(n) / sample_rate
    return MotionTrace(sample_rate, amplitude * np.sin(2.0 * np.pi * freq * t + phase))
