"""Pick the kernel implementation at import time.

The compiled module is preferred. Setting ``BELLSCAN_PURE_PYTHON=1`` forces the
fallback, which is also used when the extension was never built.
"""

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

if _compiled is not None and not os.environ.get("BELLSCAN_PURE_PYTHON"):
    kernels = _compiled
else:
    kernels = _kernels_py


def available_backends():
    """All importable kernel modules, keyed by backend name."""
    found = {"python": _kernels_py}
    if _compiled is not None:
        found["cython"] = _compiled
    return found
