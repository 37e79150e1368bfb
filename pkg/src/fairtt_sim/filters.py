"""Windowed max/min filter backend selection.

Prefers the compiled extension; falls back to the pure-Python
implementation when the extension is absent or when the environment
variable ``FAIRTT_SIM_PURE`` is set to a non-empty value.  Both backends
implement identical semantics; ``benchmarks/compare_backends.py`` measures
the difference and checks output equality end to end.
"""

import os

from . import _filters_py

if os.environ.get("FAIRTT_SIM_PURE"):
    _impl = _filters_py
else:
    try:
        from . import _filters_c as _impl
    except ImportError:
        _impl = _filters_py

BACKEND = _impl.BACKEND
WindowedMaxFilter = _impl.WindowedMaxFilter
WindowedMinFilter = _impl.WindowedMinFilter
