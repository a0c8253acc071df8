"""Hot numeric kernels with two interchangeable backends.

The heavy matrix products go through BLAS either way; what lives here are the
small-array inner loops that dominate wall time at this problem size: the 3x3
convolution forward/backward and the LSTM gate element-wise math.

Backend selection, once at import time:

* ``SEM_A2C_BACKEND=numba`` (default) JIT-compiles the loops with numba.
* ``SEM_A2C_BACKEND=numpy`` forces the pure-numpy fallback, useful for
  debugging and as the reference the numba path is tested against.

Both backends implement the same functions with identical signatures and
agree within floating-point reassociation error (see tests/test_backends.py,
and benchmarks/bench_kernels.py for the speed comparison).
"""

import os

from . import numpy_impl

_requested = os.environ.get("SEM_A2C_BACKEND", "numba").strip().lower()

if _requested == "numba":
    try:
        from . import numba_impl as _impl
    except ImportError:
        _impl = numpy_impl
elif _requested == "numpy":
    _impl = numpy_impl
else:
    raise RuntimeError(
        f"SEM_A2C_BACKEND={_requested!r} not understood; use 'numba' or 'numpy'"
    )

BACKEND = "numba" if _impl is not numpy_impl else "numpy"

conv3x3_forward = _impl.conv3x3_forward
conv3x3_backward = _impl.conv3x3_backward
lstm_gates_forward = _impl.lstm_gates_forward
lstm_gates_backward = _impl.lstm_gates_backward
