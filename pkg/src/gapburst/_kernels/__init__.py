"""Backend selection for the time-stepping kernels.

The compiled extension is used when available; set GAPBURST_BACKEND=python
to force the pure backend, or GAPBURST_BACKEND=cython to require the
compiled one (raising if it is missing).
"""

import os

from . import pure as _pure

_choice = os.environ.get("GAPBURST_BACKEND", "auto").lower()

if _choice not in ("auto", "python", "cython"):
    raise ValueError(
        "GAPBURST_BACKEND must be auto, python or cython, not %r" % _choice
    )

_impl = None
if _choice in ("auto", "cython"):
    try:
        from . import _core as _impl
    except ImportError:
        if _choice == "cython":
            raise
        _impl = None
if _impl is None:
    _impl = _pure

BACKEND_NAME = _impl.BACKEND_NAME
FIELD_ZERO = _pure.FIELD_ZERO
FIELD_CONSTANT = _pure.FIELD_CONSTANT
FIELD_BATH = _pure.FIELD_BATH

averaged_rk4 = _impl.averaged_rk4
direct_rk4 = _impl.direct_rk4
direct_rk4_dde = _impl.direct_rk4_dde


def get_backend(name=None):
    """Return the kernel module for ``name`` (active backend when None)."""
    if name in (None, "active"):
        return _impl
    if name == "python":
        return _pure
    if name == "cython":
        from . import _core

        return _core
    raise ValueError("unknown backend %r" % name)
