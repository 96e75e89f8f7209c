"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the numpy
implementations take over. Set ``SINIR_PURE_PYTHON=1`` to force the
fallback. Both backends produce bit-identical results.
"""
import os

import numpy as np

from . import _pykernels

_FORCE_PY = os.environ.get("SINIR_PURE_PYTHON", "").strip() not in ("", "0")

if _FORCE_PY:
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"


def _c(x):
    return np.ascontiguousarray(x, dtype=np.float64)


def pad_reflect(x, ph, pw, impl=None):
    return (impl or _impl).pad_reflect(_c(x), ph, pw)


def pad_reflect_adjoint(g, ph, pw, impl=None):
    return (impl or _impl).pad_reflect_adjoint(_c(g), ph, pw)


def filter_reflect(x, taps, axis, impl=None):
    return (impl or _impl).filter_reflect(_c(x), _c(taps), axis)


def filter_reflect_adjoint(g, taps, axis, impl=None):
    return (impl or _impl).filter_reflect_adjoint(_c(g), _c(taps), axis)


def im2col3(xp, r0, r1, impl=None):
    return (impl or _impl).im2col3(_c(xp), r0, r1)


def col2im3_add(gxp, cols, r0, r1, impl=None):
    """In place; ``gxp`` must already be C-contiguous float64."""
    (impl or _impl).col2im3_add(gxp, _c(cols), r0, r1)


def separable_filter(x, taps, impl=None):
    """Reflect-padded 2-D correlation with the outer product ``taps x taps``."""
    return filter_reflect(filter_reflect(x, taps, 1, impl), taps, 2, impl)


def separable_filter_adjoint(g, taps, impl=None):
    return filter_reflect_adjoint(filter_reflect_adjoint(g, taps, 2, impl), taps, 1, impl)


def backends():
    """Available kernel modules keyed by backend name."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
        out["compiled"] = _ckernels
    except ImportError:
        pass
    return out
