"""Kernel dispatch.

Set ``LIESYS_DISABLE_NUMBA=1`` before import to force the pure-numpy path.
"""

from __future__ import annotations

import logging
import os

from . import _kernels as K

logger = logging.getLogger(__name__)

_DISABLED = os.environ.get("LIESYS_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError("disabled by LIESYS_DISABLE_NUMBA")
    import numba
except ImportError as exc:
    numba = None
    logger.debug("numba unavailable (%s); using numpy kernels", exc)

USE_NUMBA = numba is not None

if USE_NUMBA:
    _jit = numba.njit(cache=True)
    run_program = _jit(K.run_program_loop)
    dense_eval = _jit(K.dense_eval_loop)
    mobius_batch = _jit(K.mobius_loop)
    expm_sl2_batch = _jit(K.expm_sl2_loop)
    cross_ratio_batch = _jit(K.cross_ratio_loop)
else:
    run_program = K.run_program_numpy
    dense_eval = K.dense_eval_numpy
    mobius_batch = K.mobius_numpy
    expm_sl2_batch = K.expm_sl2_numpy
    cross_ratio_batch = K.cross_ratio_numpy

BACKEND = "numba" if USE_NUMBA else "numpy"
