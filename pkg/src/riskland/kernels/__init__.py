"""Hot grid kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports cleanly and the environment
variable ``RISKLAND_DISABLE_NUMBA`` is unset (or ``0``). Both backends are
importable directly as :mod:`riskland.kernels._numpy` and (when numba is
installed) :mod:`riskland.kernels._numba`, which the tests and the
benchmark use to compare them.
"""

import importlib
import os

from . import _numpy

_flag = os.environ.get("RISKLAND_DISABLE_NUMBA", "").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")


def _load_numba():
    try:
        return importlib.import_module(__name__ + "._numba")
    except ImportError:  # numba missing or broken: numpy path only
        return None


_compiled = None if _disabled else _load_numba()
_impl = _compiled if _compiled is not None else _numpy
BACKEND = "numba" if _compiled is not None else "numpy"

convolve_separable = _impl.convolve_separable
max_filter = _impl.max_filter
sample_nearest = _impl.sample_nearest
accumulate_max = _impl.accumulate_max
paint_rects = _impl.paint_rects
argmin_tiebreak = _impl.argmin_tiebreak
interp_paths = _impl.interp_paths


def available_backends():
    """Return ``{name: module}`` for every importable backend."""
    out = {"numpy": _numpy}
    nb = _load_numba()
    if nb is not None:
        out["numba"] = nb
    return out
