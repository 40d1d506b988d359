"""Select the compiled kernels when available; ``HENKIN_CHOICE_PURE=1`` forces the fallback."""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("HENKIN_CHOICE_PURE") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernels_py

BACKEND: str = _impl.BACKEND
tuple_table = _impl.tuple_table
orbit_labels = _impl.orbit_labels
is_invariant = _impl.is_invariant
expand_subsets = _impl.expand_subsets
