"""Pure numpy implementations of the hot loops.

These mirror ``_ckernels.pyx`` one-to-one and are used when the compiled
extension is unavailable (or when ``RADARLAB_PURE_PYTHON=1``).
"""
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

# Status codes returned by gd_circle.
GD_GRAD_TOL = 0
GD_STEP_TOL = 1
GD_MAX_ITER = 2
GD_LR_UNDERFLOW = 3

MIN_DISTANCE = 1e-12
MIN_LEARNING_RATE = 1e-15
# relative cost change treated as rounding noise; such steps are judged by the gradient
COST_TIE = 1e-13


def circle_cost_grad(x, y, a, b, r):
    """Geometric circle cost and its gradient.

    Returns ``(J, dJ/da, dJ/db, dJ/dr, dmin)`` with
    ``J = mean((d_k - r)**2)`` and ``d_k`` the distance of point k to (a, b).
    """
    dx = a - x
    dy = b - y
    d = np.sqrt(dx * dx + dy * dy)
    dmin = d.min()
    e = d - r
    n = x.shape[0]
    cost = np.dot(e, e) / n
    if dmin < MIN_DISTANCE:
        return cost, np.nan, np.nan, np.nan, dmin
    w = e / d
    ga = 2.0 * np.dot(w, dx) / n
    gb = 2.0 * np.dot(w, dy) / n
    gr = -2.0 * e.sum() / n
    return cost, ga, gb, gr, dmin


def gd_circle(x, y, a, b, r, lr, max_iter, grad_tol, step_tol):
    """Gradient descent on the geometric circle cost with step backtracking.

    Each iteration tries the current step size and halves it until the cost
    does not increase and the center stays at least 1e-12 from every data
    point.  Near the optimum the cost change falls to rounding level; there a
    step is also accepted if J rose by no more than a relative 1e-13 and the
    gradient still points the same way (the step did not overshoot).  After an accepted step the size doubles again, capped at ``lr``.
    Stops when the gradient norm drops below ``grad_tol``, when an accepted
    step moves the parameters less than ``step_tol``, after ``max_iter``
    iterations, or when the step size underflows 1e-15.

    Returns ``(a, b, r, J, iterations, status, step)``.
    """
    cost, ga, gb, gr, _ = circle_cost_grad(x, y, a, b, r)
    it = 0
    status = GD_MAX_ITER
    step = lr
    while it < max_iter:
        gnorm = np.sqrt(ga * ga + gb * gb + gr * gr)
        if not gnorm >= grad_tol:
            status = GD_GRAD_TOL
            break
        it += 1
        while True:
            na = a - step * ga
            nb = b - step * gb
            nr = r - step * gr
            ncost, nga, ngb, ngr, dmin = circle_cost_grad(x, y, na, nb, nr)
            if dmin >= MIN_DISTANCE and (ncost <= cost or (ncost <= cost * (1.0 + COST_TIE)
                                                           and nga * ga + ngb * gb + ngr * gr > 0.0)):
                break
            step *= 0.5
            if step < MIN_LEARNING_RATE:
                return a, b, r, cost, it, GD_LR_UNDERFLOW, step
        a, b, r = na, nb, nr
        cost, ga, gb, gr = ncost, nga, ngb, ngr
        moved = step * gnorm
        step = min(2.0 * step, lr)
        if moved < step_tol:
            status = GD_STEP_TOL
            break
    return a, b, r, cost, it, status, step


def dacm_accumulate(i, q, min_power):
    """Cumulative DACM phase (radians), zero at the first sample.

    Returns ``(phase, bad_index)`` where ``bad_index`` is the first sample
    whose squared magnitude is below ``min_power`` (or -1).
    """
    power = i * i + q * q
    bad = np.flatnonzero(power < min_power)
    if bad.size:
        return None, int(bad[0])
    inc = (i[1:] * (q[1:] - q[:-1]) - q[1:] * (i[1:] - i[:-1])) / power[1:]
    phase = np.empty_like(i)
    phase[0] = 0.0
    np.cumsum(inc, out=phase[1:])
    return phase, -1


def fir_decimate(x, taps, first, step, n_out):
    """Zero-phase FIR evaluated only at ``first + j*step`` for j < n_out.

    ``out[j] = sum_t taps[t] * x[c_j + (L-1)//2 - t]`` with ``c_j`` the
    output center and samples outside ``x`` treated as zero.
    """
    L = taps.shape[0]
    half = (L - 1) // 2
    centers = first + np.arange(n_out) * step
    # pad so every window, even for centers past the end of x, lies inside the buffer
    extra = max(0, int(centers[-1]) + L - x.shape[0]) if n_out else 0
    pad = np.zeros(x.shape[0] + 2 * L + extra)
    pad[L:L + x.shape[0]] = x
    windows = sliding_window_view(pad, L)
    # window starting at pad index s covers x[s-L .. s-1]; we need x[c-(L-1-half) .. c+half]
    return windows[centers + L - (L - 1 - half)] @ taps[::-1]
