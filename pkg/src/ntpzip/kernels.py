"""Codec kernel engine selection.

Prefers the compiled extension when it imported cleanly, falling back to
the pure-Python implementation. NTPZIP_ENGINE forces the choice: "c"
requires the extension, "py" forces the fallback, "auto" (or unset)
picks the fastest available. Both engines implement the same functions
with identical outputs.
"""

from __future__ import annotations

import os

from . import _pykernels

_requested = os.environ.get("NTPZIP_ENGINE", "auto").lower()
if _requested not in ("auto", "c", "py"):
    raise ValueError(f"NTPZIP_ENGINE must be auto, c, or py, not {_requested!r}")

_impl = None
if _requested in ("auto", "c"):
    try:
        from . import _ckernels as _impl
    except ImportError:
        if _requested == "c":
            raise
        _impl = None
if _impl is None:
    _impl = _pykernels

ENGINE = "c" if _impl is not _pykernels else "py"

argmax_in_range = _impl.argmax_in_range
full_ranking = _impl.full_ranking
counter_encode = _impl.counter_encode
counter_decode = _impl.counter_decode
rank_encode = _impl.rank_encode
rank_decode = _impl.rank_decode
