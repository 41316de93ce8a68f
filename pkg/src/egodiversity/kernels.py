"""Kernel backend selection.

The compiled extension is preferred when importable; otherwise the pure
Python implementation takes over transparently.  Set EGODIVERSITY_KERNELS
to ``python`` or ``cython`` to force a backend (``cython`` raises if the
extension is missing).
"""

from __future__ import annotations

import os

from . import _kernels_py

_requested = os.environ.get("EGODIVERSITY_KERNELS", "auto").lower()

if _requested not in ("auto", "python", "cython"):
    raise ValueError(f"EGODIVERSITY_KERNELS must be auto|python|cython, got {_requested!r}")

if _requested == "python":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        if _requested == "cython":
            raise
        _impl = _kernels_py
        BACKEND = "python"

MODE_SINGLE = _kernels_py.MODE_SINGLE
MODE_MULTIPLE = _kernels_py.MODE_MULTIPLE
MODE_ADAPTIVE = _kernels_py.MODE_ADAPTIVE

induced_edges = _impl.induced_edges
weak_labels = _impl.weak_labels
scc_labels = _impl.scc_labels
kclip_run = _impl.kclip_run
jaccard_bridges = _impl.jaccard_bridges
jaccard_merge_count = _impl.jaccard_merge_count


def backend() -> str:
    """Name of the active kernel backend ("cython" or "python")."""
    return BACKEND
