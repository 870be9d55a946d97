"""Kernel backend selection.

The compiled extension is preferred when importable; otherwise the
pure-Python reference implementation is used.  Setting the environment
variable ``ALEXOT_PURE=1`` forces the fallback, which is useful for
benchmarking and for debugging suspected extension issues.
"""

import os

from . import pure

if os.environ.get("ALEXOT_PURE"):
    _impl = pure
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pure

pairwise_distances = _impl.pairwise_distances
comparison_scan = _impl.comparison_scan


def backend_name() -> str:
    """Name of the active kernel backend ("fast" or "pure")."""
    return _impl.BACKEND_NAME
