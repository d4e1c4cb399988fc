"""Kernel dispatch: compiled extension if built, numpy fallback otherwise."""

from __future__ import annotations

import os

from . import _kernels_py

try:  # pragma: no cover - depends on the build
    if os.environ.get("LEVY_EXTREMUM_PURE_PYTHON"):
        raise ImportError
    from . import _kernels as _compiled
    BACKEND = "compiled"
    cauchy_tables = _compiled.cauchy_tables
except ImportError:  # pragma: no cover
    _compiled = None
    BACKEND = "python"
    cauchy_tables = _kernels_py.cauchy_tables

cauchy_tables_python = _kernels_py.cauchy_tables
cauchy_tables_compiled = _compiled.cauchy_tables if _compiled is not None else None
