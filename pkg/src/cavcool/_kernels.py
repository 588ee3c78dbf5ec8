"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
implementation. Set ``CAVCOOL_BACKEND=python`` to force the fallback.
"""
import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels


def get_backend(name=None):
    """Return the kernel module called ``name`` (default: the active one)."""
    if name is None:
        name = BACKEND
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} unavailable; have {sorted(_BACKENDS)}") from None


def available_backends():
    return sorted(_BACKENDS)


_requested = os.environ.get("CAVCOOL_BACKEND", "").strip().lower()
if _requested:
    if _requested not in _BACKENDS:
        raise ImportError(f"CAVCOOL_BACKEND={_requested!r} is not available")
    BACKEND = _requested
else:
    BACKEND = "cython" if _ckernels is not None else "python"

kernels = _BACKENDS[BACKEND]
