# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in ``_pykernels``; same signatures."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

cdef enum:
    GD_GRAD_TOL = 0
    GD_STEP_TOL = 1
    GD_MAX_ITER = 2
    GD_LR_UNDERFLOW = 3

cdef double MIN_DISTANCE = 1e-12
cdef double MIN_LEARNING_RATE = 1e-15
cdef double COST_TIE = 1e-13


cdef void _cost_grad(const double[::1] x, const double[::1] y, double a, double b,
                     double r, double* out) noexcept nogil:
    # out = [J, ga, gb, gr, dmin]
    cdef Py_ssize_t k, n = x.shape[0]
    cdef double dx, dy, d, e, s_ee = 0.0, s_wa = 0.0, s_wb = 0.0, s_e = 0.0
    cdef double dmin = 1e308
    for k in range(n):
        dx = a - x[k]
        dy = b - y[k]
        d = sqrt(dx * dx + dy * dy)
        if d < dmin:
            dmin = d
        e = d - r
        s_ee += e * e
        s_e += e
        if d > 0.0:
            s_wa += e * dx / d
            s_wb += e * dy / d
    out[0] = s_ee / n
    out[1] = 2.0 * s_wa / n
    out[2] = 2.0 * s_wb / n
    out[3] = -2.0 * s_e / n
    out[4] = dmin


def circle_cost_grad(const double[::1] x, const double[::1] y, double a, double b, double r):
    cdef double out[5]
    _cost_grad(x, y, a, b, r, out)
    if out[4] < MIN_DISTANCE:
        return out[0], np.nan, np.nan, np.nan, out[4]
    return out[0], out[1], out[2], out[3], out[4]


def gd_circle(const double[::1] x, const double[::1] y, double a, double b, double r,
              double lr, long max_iter, double grad_tol, double step_tol):
    cdef double cur[5]
    cdef double nxt[5]
    cdef double na, nb, nr, gnorm
    cdef double step = lr
    cdef long it = 0
    cdef int status = GD_MAX_ITER
    cdef bint underflow = False
    with nogil:
        _cost_grad(x, y, a, b, r, cur)
        while it < max_iter:
            gnorm = sqrt(cur[1] * cur[1] + cur[2] * cur[2] + cur[3] * cur[3])
            if not gnorm >= grad_tol:
                status = GD_GRAD_TOL
                break
            it += 1
            while True:
                na = a - step * cur[1]
                nb = b - step * cur[2]
                nr = r - step * cur[3]
                _cost_grad(x, y, na, nb, nr, nxt)
                if nxt[4] >= MIN_DISTANCE and (
                        nxt[0] <= cur[0]
                        or (nxt[0] <= cur[0] * (1.0 + COST_TIE)
                            and nxt[1] * cur[1] + nxt[2] * cur[2] + nxt[3] * cur[3] > 0.0)):
                    break
                step *= 0.5
                if step < MIN_LEARNING_RATE:
                    underflow = True
                    break
            if underflow:
                status = GD_LR_UNDERFLOW
                break
            a = na
            b = nb
            r = nr
            cur[0] = nxt[0]
            cur[1] = nxt[1]
            cur[2] = nxt[2]
            cur[3] = nxt[3]
            gnorm = step * gnorm
            step = 2.0 * step if 2.0 * step < lr else lr
            if gnorm < step_tol:
                status = GD_STEP_TOL
                break
    return a, b, r, cur[0], it, status, step


def dacm_accumulate(const double[::1] i, const double[::1] q, double min_power):
    cdef Py_ssize_t k, n = i.shape[0]
    cdef double p, acc = 0.0
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] ph = out
    for k in range(n):
        p = i[k] * i[k] + q[k] * q[k]
        if p < min_power:
            return None, k
        if k == 0:
            ph[0] = 0.0
            continue
        acc += (i[k] * (q[k] - q[k - 1]) - q[k] * (i[k] - i[k - 1])) / p
        ph[k] = acc
    return out, -1


def fir_decimate(const double[::1] x, const double[::1] taps, Py_ssize_t first,
                 Py_ssize_t step, Py_ssize_t n_out):
    cdef Py_ssize_t L = taps.shape[0], n = x.shape[0]
    cdef Py_ssize_t half = (L - 1) // 2
    cdef Py_ssize_t j, t, c, m
    cdef double acc
    out = np.zeros(n_out, dtype=np.float64)
    cdef double[::1] y = out
    with nogil:
        for j in range(n_out):
            c = first + j * step
            acc = 0.0
            for t in range(L):
                m = c + half - t
                if 0 <= m < n:
                    acc += taps[t] * x[m]
            y[j] = acc
    return out
