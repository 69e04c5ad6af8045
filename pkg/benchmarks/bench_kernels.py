"""Time the compiled and numpy kernel backends on representative inputs.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat N]

Inputs mirror the default pipeline: a 12000-sample constellation arc for the
circle fit and DACM, and 120 s of 40 kS/s IF data for the decimating FIR.
Each backend's outputs are also compared against the numpy one.
"""
import argparse
import timeit

import numpy as np

from radarlab import _kernels
from radarlab.digital_if import IfParams


def _inputs():
    rng = np.random.default_rng(0)
    th = np.linspace(0.0, np.radians(90.0), 12_000)
    x = np.cos(th) + 0.005 * rng.standard_normal(th.size)
    y = np.sin(th) + 0.005 * rng.standard_normal(th.size)
    # normalized coordinates, as the fitter uses them
    u, v = x - x.mean(), y - y.mean()
    s = np.sqrt(np.mean(u * u + v * v))
    u, v = np.ascontiguousarray(u / s), np.ascontiguousarray(v / s)
    ifp = IfParams()
    sig = rng.standard_normal(int(120 * ifp.if_sample_rate))
    return u, v, x, y, sig, ifp.lowpass_taps(), ifp.decimation


def _cases(k, u, v, x, y, sig, taps, D):
    n_out = sig.size // D
    return {
        "circle_cost_grad": lambda: k.circle_cost_grad(u, v, 0.1, -0.2, 1.3),
        "gd_circle (2000 it)": lambda: k.gd_circle(u, v, 0.5, 0.5, 1.0, 0.5, 2000, 1e-12, 1e-15),
        "dacm_accumulate": lambda: k.dacm_accumulate(x, y, 1e-24),
        "fir_decimate": lambda: k.fir_decimate(sig, taps, D // 2, D, n_out),
    }


def _flat(out):
    """All numeric outputs of a kernel call as one float vector."""
    parts = out if isinstance(out, tuple) else (out,)
    return np.concatenate([np.atleast_1d(np.asarray(p, dtype=float)).ravel() for p in parts if p is not None])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    data = _inputs()
    backends = _kernels.available_backends()
    print(f"active backend: {_kernels.BACKEND}; available: {', '.join(backends)}")
    ref = _cases(backends["python"], *data)
    times = {}
    for name, mod in backends.items():
        for case, fn in _cases(mod, *data).items():
            times[name, case] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
            if name != "python":
                times[name, case + " maxdiff"] = np.max(np.abs(_flat(fn()) - _flat(ref[case]())))
    print(f"{'kernel':<22}" + "".join(f"{n + ' [ms]':>16}" for n in backends) + f"{'speedup':>10}")
    for case in ref:
        row = [times[n, case] * 1e3 for n in backends]
        speed = times["python", case] / times["cython", case] if "cython" in backends else float("nan")
        print(f"{case:<22}" + "".join(f"{t:>16.3f}" for t in row) + f"{speed:>9.1f}x")
    if "cython" in backends:
        for case in ref:
            print(f"max |cython - python| {case}: {times['cython', case + ' maxdiff']:.2e}")


if __name__ == "__main__":
    main()
