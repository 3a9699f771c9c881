"""Hot loops, compiled when the Cython extension was built.

``BACKEND`` is ``"cython"`` or ``"python"``.  Setting ``KTRAJ_PURE_PYTHON=1``
forces the fallback.
"""

import os

from . import _slow

if os.environ.get("KTRAJ_PURE_PYTHON") == "1":
    _impl = _slow
    BACKEND = "python"
else:
    try:
        from . import _fast as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _slow
        BACKEND = "python"

speed_profile = _impl.speed_profile
arrival_times = _impl.arrival_times
fnv1a64 = _impl.fnv1a64

__all__ = ["BACKEND", "speed_profile", "arrival_times", "fnv1a64"]
