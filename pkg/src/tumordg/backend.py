"""Kernel backend selection.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``TUMORDG_PURE_PYTHON`` is set to a non-empty value
other than ``0``, the numpy implementation is used.
"""
import logging
import os

from . import _kernels_py

log = logging.getLogger(__name__)


def _load():
    if os.environ.get("TUMORDG_PURE_PYTHON", "0") not in ("", "0"):
        return _kernels_py, "python"
    try:
        from . import _kernels
    except ImportError:
        log.debug("compiled kernels unavailable, using numpy fallback")
        return _kernels_py, "python"
    return _kernels, "compiled"


kernels, NAME = _load()


def use(name: str) -> None:
    """Switch backend at runtime (``"compiled"`` or ``"python"``)."""
    global kernels, NAME
    if name == "python":
        kernels, NAME = _kernels_py, "python"
    elif name == "compiled":
        from . import _kernels

        kernels, NAME = _kernels, "compiled"
    else:
        raise ValueError(f"unknown backend {name!r}")
