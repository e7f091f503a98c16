"""Backend selection for the GRU recurrence kernels.

The compiled extension is used when it was built at install time. Setting
``ABSA_PURE_PYTHON=1`` before import forces the numpy fallback.
"""

import os

import numpy as np

from . import _gru_py

BACKEND = "python"
_ext = None

if os.environ.get("ABSA_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _gru_ext as _ext
    except ImportError:
        _ext = None
    else:
        BACKEND = "compiled"

_impl = _ext if _ext is not None else _gru_py


def available_backends():
    return {"python": _gru_py, **({"compiled": _ext} if _ext is not None else {})}


def _c(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def gru_forward(xp, U, h0, impl=None):
    """Run the recurrence; returns ``(states, update, reset, candidate)``."""
    impl = impl or _impl
    return impl.gru_forward(_c(xp), _c(U), _c(h0))


def gru_backward(dhs, U, h0, hs, zs, rs, cs, impl=None):
    """Return ``(d_projection, dU, dh0)``."""
    impl = impl or _impl
    return impl.gru_backward(_c(dhs), _c(U), _c(h0), hs, zs, rs, cs)
