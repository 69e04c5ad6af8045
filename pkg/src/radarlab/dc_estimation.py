"""DC-offset estimation by fitting a circle to the I/Q constellation.

With balanced amplitudes the centered samples satisfy
(I - DC_I)^2 + (Q - DC_Q)^2 = A^2, so the constellation lies on a circle
whose center is the DC offset.  The fit is seeded by the algebraic (Kasa)
least-squares solution and refined by gradient descent on the geometric
cost ``J(a, b, r) = mean((d_k - r)^2)``.

Both fitters work on a copy of the data translated to its centroid and
scaled to unit RMS spread, so results are translation- and scale-equivariant
and the GD tolerances are dimensionless.
"""
from dataclasses import dataclass
import logging

import numpy as np

from . import _kernels
from .errors import DegenerateGeometryError, DomainError, NonConvergenceError
from .radar_model import IQRecord

logger = logging.getLogger(__name__)

SHORT_ARC_DEG = 10.0


@dataclass(frozen=True)
class CircleFit:
    """Fitted constellation circle.

    ``arc_coverage_deg`` is the angular span of the samples seen from the
    fitted center; ``short_arc`` is raised below 10 degrees, where the center
    is poorly determined.
    """

    center_i: float
    center_q: float
    radius: float
    residual_rms: float
    iterations: int = 0
    converged: bool = True
    arc_coverage_deg: float = float("nan")

    @property
    def short_arc(self):
        return not self.arc_coverage_deg >= SHORT_ARC_DEG


@dataclass(frozen=True)
class GdConfig:
    """Gradient-descent settings; learning rate and tolerances are in normalized units."""

    learning_rate: float = 0.5
    max_iterations: int = 5000
    grad_tolerance: float = 1e-9
    parameter_tolerance: float = 1e-12

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise DomainError("learning_rate must be positive")
        if not self.max_iterations >= 1:
            raise DomainError("max_iterations must be at least 1")
        if not (self.grad_tolerance > 0 and self.parameter_tolerance > 0):
            raise DomainError("tolerances must be positive")


def _points(iq):
    if isinstance(iq, IQRecord):
        return iq.i_samples, iq.q_samples
    x, y = iq
    return np.asarray(x, dtype=np.float64).reshape(-1), np.asarray(y, dtype=np.float64).reshape(-1)


def _normalize(x, y):
    cx = x.mean()
    cy = y.mean()
    u = x - cx
    v = y - cy
    s = np.sqrt(np.mean(u * u + v * v))
    if not s > 0:
        raise DegenerateGeometryError("all points coincide")
    return np.ascontiguousarray(u / s), np.ascontiguousarray(v / s), cx, cy, s


def geometric_cost(iq, a, b, r):
    """Geometric cost J and gradient (dJ/da, dJ/db, dJ/dr) in the data's own units."""
    x, y = _points(iq)
    cost, ga, gb, gr, _ = _kernels.circle_cost_grad(np.ascontiguousarray(x), np.ascontiguousarray(y),
                                                    float(a), float(b), float(r))
    return cost, np.array([ga, gb, gr])


def arc_coverage(iq, center_i, center_q):
    """Angular span in degrees of the samples around (center_i, center_q)."""
    x, y = _points(iq)
    ang = np.sort(np.arctan2(y - center_q, x - center_i))
    if ang.size < 2:
        return 0.0
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
    return float(np.degrees(2 * np.pi - gaps.max()))


def kasa_init(iq):
    """Algebraic least-squares circle through the samples (Kasa fit).

    Solves ``I^2 + Q^2 + D*I + E*Q + F = 0`` in the least-squares sense and
    returns center (-D/2, -E/2) and radius sqrt(D^2/4 + E^2/4 - F).

    Raises
    ------
    DegenerateGeometryError
        Fewer than 3 points, or the points are (numerically) collinear.
    """
    x, y = _points(iq)
    if x.size < 3:
        raise DegenerateGeometryError(f"need at least 3 points, got {x.size}")
    u, v, cx, cy, s = _normalize(x, y)
    A = np.column_stack([u, v, np.ones_like(u)])
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] <= 1e-10 * sv[0]:
        raise DegenerateGeometryError("points are collinear")
    (D, E, F), *_ = np.linalg.lstsq(A, -(u * u + v * v), rcond=None)
    r2 = 0.25 * (D * D + E * E) - F
    if not r2 > 0:
        raise DegenerateGeometryError("algebraic fit gave a non-positive squared radius")
    a, b, r = -0.5 * D, -0.5 * E, np.sqrt(r2)
    cost, *_ = _kernels.circle_cost_grad(u, v, a, b, r)
    ci, cq = cx + s * a, cy + s * b
    return CircleFit(ci, cq, s * r, s * np.sqrt(cost), 0, True, arc_coverage((x, y), ci, cq))


def gd_refine(iq, init, cfg=None):
    """Refine ``init`` by gradient descent on the geometric cost.

    Works in coordinates centered on the data centroid and scaled by its RMS
    spread, so ``learning_rate`` is dimensionless.  A proposed step that
    increases J, or lands the center on a data point, is rejected and the
    step size halved; after each accepted step the size doubles back toward
    ``learning_rate``.  Stops when the gradient norm drops below
    ``grad_tolerance``, when an accepted step moves the (scaled) parameters
    less than ``parameter_tolerance``, or after ``max_iterations`` steps;
    ``converged`` is False only in the last case.

    Raises
    ------
    NonConvergenceError
        The step size fell below 1e-15 without an acceptable step.
    DomainError
        The initial center coincides with a data point.
    """
    cfg = cfg or GdConfig()
    x, y = _points(iq)
    if x.size < 3:
        raise DegenerateGeometryError(f"need at least 3 points, got {x.size}")
    u, v, cx, cy, s = _normalize(x, y)
    a0 = (init.center_i - cx) / s
    b0 = (init.center_q - cy) / s
    r0 = init.radius / s
    if np.min(np.hypot(u - a0, v - b0)) < _kernels.MIN_DISTANCE:
        raise DomainError("initial center coincides with a data point")
    a, b, r, cost, it, status, lr = _kernels.gd_circle(u, v, a0, b0, r0, cfg.learning_rate,
                                                       int(cfg.max_iterations), cfg.grad_tolerance,
                                                       cfg.parameter_tolerance)
    if status == _kernels.GD_LR_UNDERFLOW:
        raise NonConvergenceError(f"learning rate underflow after {it} iterations")
    if not r > 0:
        raise NonConvergenceError("gradient descent drove the radius non-positive")
    converged = status != _kernels.GD_MAX_ITER
    if not converged:
        logger.warning("circle GD hit max_iterations=%d without meeting tolerances", cfg.max_iterations)
    ci, cq = cx + s * a, cy + s * b
    return CircleFit(ci, cq, s * r, s * np.sqrt(cost), int(it), converged,
                     arc_coverage((x, y), ci, cq))


def fit_circle(iq, cfg=None):
    """Kasa initialization followed by GD refinement."""
    return gd_refine(iq, kasa_init(iq), cfg)


def remove_dc(iq, fit):
    """Subtract the fitted center from every sample."""
    return IQRecord(iq.sample_rate, iq.i_samples - fit.center_i, iq.q_samples - fit.center_q,
                    iq.start_time, iq.transient_samples)
