"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; the pure
Python twin is the fallback.  Both produce bit-identical results, so
the choice only affects speed.  Set DTA_SIM_BACKEND=python or
DTA_SIM_BACKEND=c to force one side (forcing c when the extension is
not built raises ImportError).
"""

from __future__ import annotations

import os

from . import _pykernels

_FORCED = os.environ.get("DTA_SIM_BACKEND", "").strip().lower()

if _FORCED == "python":
    kernels = _pykernels
elif _FORCED == "c":
    from . import _kernels as kernels  # type: ignore[no-redef]
elif _FORCED == "":
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        kernels = _pykernels
else:
    raise ImportError(
        f"DTA_SIM_BACKEND must be 'c' or 'python', got {_FORCED!r}"
    )

BACKEND_NAME: str = kernels.BACKEND_NAME


def backend_name() -> str:
    """Which kernel implementation is active: 'c' or 'python'."""
    return BACKEND_NAME
