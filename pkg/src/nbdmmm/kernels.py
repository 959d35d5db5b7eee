"""Backend selection for the hot selection loop.

The compiled extension is used when it imports; set ``NBDMMM_PURE_PYTHON=1``
to force the fallback.
"""

import os

import numpy as np

from . import _pykernels

_compiled = None
if not os.environ.get("NBDMMM_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def pick_sequence(keys, ref_cols, backend=None):
    """Row index picked at each step; see :func:`nbdmmm._pykernels.pick_sequence`."""
    backend = backend or BACKEND
    if backend == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available")
        keys = np.ascontiguousarray(keys, dtype=np.float64)
        if keys.shape[0] == 0 or len(ref_cols) == 0:
            return []
        cols = np.ascontiguousarray(ref_cols, dtype=np.intp)
        return _compiled.pick_sequence(keys, cols).tolist()
    if len(keys) == 0:
        return []
    return _pykernels.pick_sequence(keys, ref_cols)


def available_backends():
    return ["python"] + (["cython"] if _compiled is not None else [])
