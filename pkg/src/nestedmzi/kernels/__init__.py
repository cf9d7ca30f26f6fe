"""Hot numeric kernels with a numba backend and a pure-numpy fallback.

The backend is picked once at import time. Set ``NESTEDMZI_DISABLE_NUMBA=1``
to force the numpy path (or run without numba installed).
"""

import os

from . import _numpy

BACKEND = "numpy"
_impl = _numpy

if os.environ.get("NESTEDMZI_DISABLE_NUMBA", "0") not in ("1", "true", "yes"):
    try:
        from . import _numba

        _impl = _numba
        BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba is optional
        pass

erf = _impl.erf
bessel_j = _impl.bessel_j
dft_bins = _impl.dft_bins
sine_bins = _impl.sine_bins
sign_overlap = _impl.sign_overlap


def backends():
    """Both backend modules keyed by name (numba only when importable)."""
    out = {"numpy": _numpy}
    try:
        from . import _numba

        out["numba"] = _numba
    except ImportError:  # pragma: no cover
        pass
    return out
