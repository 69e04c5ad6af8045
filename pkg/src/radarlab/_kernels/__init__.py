"""Hot-loop kernels, compiled when possible.

The Cython extension ``_ckernels`` is imported if it was built; otherwise the
numpy implementations in ``_pykernels`` are used.  Setting the environment
variable ``RADARLAB_PURE_PYTHON=1`` forces the numpy fallback.  ``BACKEND``
names the implementation in use (``"cython"`` or ``"python"``).
"""
import importlib
import os

from . import _pykernels


def _load_compiled():
    try:
        return importlib.import_module(__name__ + "._ckernels")
    except ImportError:  # extension not built
        return None


_ckernels = None
if os.environ.get("RADARLAB_PURE_PYTHON", "") not in ("1", "true", "yes"):
    _ckernels = _load_compiled()

_impl = _ckernels if _ckernels is not None else _pykernels
BACKEND = "cython" if _ckernels is not None else "python"

circle_cost_grad = _impl.circle_cost_grad
gd_circle = _impl.gd_circle
dacm_accumulate = _impl.dacm_accumulate
fir_decimate = _impl.fir_decimate

GD_GRAD_TOL = _pykernels.GD_GRAD_TOL
GD_STEP_TOL = _pykernels.GD_STEP_TOL
GD_MAX_ITER = _pykernels.GD_MAX_ITER
GD_LR_UNDERFLOW = _pykernels.GD_LR_UNDERFLOW
MIN_DISTANCE = _pykernels.MIN_DISTANCE


def available_backends():
    """Return a dict mapping backend name to kernel module."""
    out = {"python": _pykernels}
    ck = _ckernels if _ckernels is not None else _load_compiled()
    if ck is not None:
        out["cython"] = ck
    return out
