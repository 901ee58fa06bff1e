"""Kernel backend selection.

The training hot loops (recurrent forward/backward passes and the
regularized loss) exist in two implementations: numba-jitted scalar
kernels in ``_kernels_numba`` and vectorized numpy fallbacks in
``_kernels_numpy``.  The active implementation is chosen once at import
time from the ``ANTIMIMIC_BACKEND`` environment variable:

* ``auto`` (default) -- numba when importable, numpy otherwise;
* ``numba``          -- require numba, fail loudly if missing;
* ``numpy``          -- force the pure-numpy path (no numba import).

Both backends are deterministic run-to-run.  Results agree across
backends to floating-point reduction order (~1e-12 relative), not
bitwise; byte-identical artifacts are guaranteed per backend.
"""

from __future__ import annotations

import os

_choice = os.environ.get("ANTIMIMIC_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "numba", "numpy"):
    raise RuntimeError(
        f"ANTIMIMIC_BACKEND must be one of auto/numba/numpy, got {_choice!r}"
    )

if _choice == "numpy":
    from antimimic import _kernels_numpy as _impl

    BACKEND = "numpy"
else:
    try:
        from antimimic import _kernels_numba as _impl

        BACKEND = "numba"
    except ImportError:
        if _choice == "numba":
            raise
        from antimimic import _kernels_numpy as _impl

        BACKEND = "numpy"

reg_loss_batch = _impl.reg_loss_batch
mse_loss_batch = _impl.mse_loss_batch
rnn_forward_batch = _impl.rnn_forward_batch
rnn_backward_batch = _impl.rnn_backward_batch

__all__ = [
    "BACKEND",
    "reg_loss_batch",
    "mse_loss_batch",
    "rnn_forward_batch",
    "rnn_backward_batch",
]
