"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the pure-Python
module is loaded. Set ``SPECTRAL_OUS_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("SPECTRAL_OUS_PURE_PYTHON", "") == "1":
    from . import _kernels_py as _impl
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl
        BACKEND = "python"

jacobi_sweeps = _impl.jacobi_sweeps
xorshift_fill = _impl.xorshift_fill

__all__ = ["BACKEND", "jacobi_sweeps", "xorshift_fill"]
