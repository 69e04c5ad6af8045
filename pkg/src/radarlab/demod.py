"""Displacement recovery from DC-centered I/Q.

Two routes are provided:

* arctangent: four-quadrant phase, unwrapped, scaled by lambda/(4*pi);
* extended DACM: accumulate the cross-multiplied first differences
  ``(I[k](Q[k]-Q[k-1]) - Q[k](I[k]-I[k-1])) / (I[k]^2 + Q[k]^2)``.

Both anchor the first output sample at zero.  In 0-based indexing the DACM
sum for output n runs over k = 1..n (the 1-based k = 2..n).

For constant magnitude each DACM increment equals sin(dphi) rather than
dphi, so the two routes agree only while per-sample phase steps stay small;
the error per step is about dphi^3/6.  Steps of pi/2 or more are reported in
``suspect_steps``.
"""
from dataclasses import dataclass, field
import enum

import numpy as np

from . import _kernels
from .errors import DomainError, UndefinedPhaseError

MIN_POWER = 1e-24


class DemodMethod(str, enum.Enum):
    ARCTANGENT = "arctangent"
    DACM = "dacm"


@dataclass(frozen=True, eq=False)
class DisplacementEstimate:
    """Recovered displacement in meters, relative to the first sample."""

    sample_rate: float
    displacements: np.ndarray
    method: DemodMethod
    start_time: float = 0.0
    suspect_steps: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __post_init__(self):
        object.__setattr__(self, "displacements",
                           np.asarray(self.displacements, dtype=np.float64).reshape(-1))
        object.__setattr__(self, "method", DemodMethod(self.method))

    def __len__(self):
        return self.displacements.size

    @property
    def times(self):
        return self.start_time + np.arange(len(self)) / self.sample_rate


def _check(iq, wavelength):
    if not wavelength > 0:
        raise DomainError(f"wavelength must be positive, got {wavelength}")
    i = np.ascontiguousarray(iq.i_samples)
    q = np.ascontiguousarray(iq.q_samples)
    bad = np.flatnonzero(i * i + q * q < MIN_POWER)
    if bad.size:
        raise UndefinedPhaseError(bad[0])
    return i, q


def suspect_steps(i, q):
    """Indices k whose phase change from k-1 is pi/2 or more (non-positive dot product)."""
    dot = i[1:] * i[:-1] + q[1:] * q[:-1]
    return np.flatnonzero(dot <= 0) + 1


def arctan_demod(iq, wavelength):
    """Unwrapped arctangent phase scaled to displacement, with x[0] = 0."""
    i, q = _check(iq, wavelength)
    phi = np.unwrap(np.arctan2(q, i))
    x = (phi - phi[0]) * (wavelength / (4.0 * np.pi))
    return DisplacementEstimate(iq.sample_rate, x, DemodMethod.ARCTANGENT, iq.start_time,
                                suspect_steps(i, q))


def dacm_demod(iq, wavelength):
    """Extended DACM accumulation scaled to displacement, with x[0] = 0."""
    i, q = _check(iq, wavelength)
    if i.size < 2:
        raise DomainError("DACM needs at least 2 samples")
    phase, bad = _kernels.dacm_accumulate(i, q, MIN_POWER)
    if bad >= 0:
        raise UndefinedPhaseError(bad)
    return DisplacementEstimate(iq.sample_rate, phase * (wavelength / (4.0 * np.pi)), DemodMethod.DACM,
                                iq.start_time, suspect_steps(i, q))


def demodulate(iq, wavelength, method):
    method = DemodMethod(method)
    if method is DemodMethod.ARCTANGENT:
        return arctan_demod(iq, wavelength)
    return dacm_demod(iq, wavelength)
