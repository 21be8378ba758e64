"""Kernel backend selection.

The compiled Cython kernels are used when available; the numpy fallback is
always present. Set ``NULLATTACK_BACKEND=python`` or ``cython`` to force a
backend (``auto`` is the default).
"""

import os

_requested = os.environ.get("NULLATTACK_BACKEND", "auto")

if _requested not in ("auto", "python", "cython"):
    raise RuntimeError(f"unknown NULLATTACK_BACKEND {_requested!r}")

if _requested == "python":
    from . import py_backend as _impl
else:
    try:
        from . import _cy_core as _impl
    except ImportError:
        if _requested == "cython":
            raise
        from . import py_backend as _impl

BACKEND = _impl.NAME
project = _impl.project
weighted_mean = _impl.weighted_mean
slide = _impl.slide
