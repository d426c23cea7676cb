"""Kernel backend selection.

The compiled ``_kernels`` extension is used when it was built and
``QOPT_PURE`` is not set to ``1``; otherwise the numpy versions in
``_fallback`` are used. ``BACKEND`` names the active choice.
"""
import os

from . import _fallback

if os.environ.get("QOPT_PURE") == "1":
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"

enumerate_qubo = _impl.enumerate_qubo
sa_block = _impl.sa_block
apply_x_rotations = _impl.apply_x_rotations


def compiled():
    """The compiled module, or ``None`` when it is not available."""
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels
