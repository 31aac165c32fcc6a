"""Pick the compiled kernels when importable, else the numpy fallback.

Set ``INETSIM_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pure

if os.environ.get("INETSIM_PURE_PYTHON", "") not in ("", "0"):
    _compiled = None
else:
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
_impl = _compiled if _compiled is not None else _pure

ppr_affinity = _impl.ppr_affinity
root_distance = _impl.root_distance
