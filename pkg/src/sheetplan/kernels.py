"""Kernel backend selection: compiled extension if available, numpy otherwise.

Set SHEETPLAN_PURE_PYTHON=1 to force the numpy fallback (used by the
benchmark and by tests that compare the two backends).
"""
import os

from . import _hangcore_py

if os.environ.get("SHEETPLAN_PURE_PYTHON"):
    _impl = _hangcore_py
    BACKEND = "python"
else:
    try:
        from . import _hangcore as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = _hangcore_py
        BACKEND = "python"

lowest_point = _impl.lowest_point
lowest_point_grid = _impl.lowest_point_grid
