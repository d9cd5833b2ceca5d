"""Numeric kernel backend selection.

The compiled extension (`_core`, Cython) is preferred when it has been
built; otherwise the numpy/scipy reference implementation (`_ref`) is used.
Set the environment variable ``FSO_NOMA_PURE=1`` to force the reference
backend even when the extension is available.

Both backends expose the same functions and agree to roundoff, so nothing
above this package needs to know which one is active.
"""

from __future__ import annotations

import os

from . import _ref

if os.environ.get("FSO_NOMA_PURE", "") not in ("", "0"):
    _impl = _ref
    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        _impl = _ref
        BACKEND = "python"

log_kv = _impl.log_kv
intensity_logpdf = _impl.intensity_logpdf
intensity_pdf = _impl.intensity_pdf
h_logpdf = _impl.h_logpdf
h_pdf = _impl.h_pdf
sic_rate_matrix = _impl.sic_rate_matrix
telescoped_sum_rate = _impl.telescoped_sum_rate


def backend_name() -> str:
    """Return which kernel backend is active: 'compiled' or 'python'."""
    return BACKEND
