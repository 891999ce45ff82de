"""Kernel backend selection.

The compiled extension is preferred; the numpy fallback is used when the
extension is missing or ``HIERARCHY_LAB_PURE_PYTHON`` is set at import.
"""

import os

from . import _kernels_py

try:
    if os.environ.get("HIERARCHY_LAB_PURE_PYTHON"):
        raise ImportError("pure-Python kernels requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

DEFAULT = _compiled if _compiled is not None else _kernels_py
BACKEND = DEFAULT.NAME


def available():
    return ["compiled", "python"] if _compiled is not None else ["python"]


def get(name=None):
    """Kernel module by name (``"compiled"``, ``"python"``) or the default."""
    if name is None:
        return DEFAULT
    if name == "python":
        return _kernels_py
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernels are not built; run `pip install -e .`")
        return _compiled
    raise ValueError(f"unknown kernel backend {name!r}")
