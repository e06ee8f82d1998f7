"""Kernel backend selection.

The compiled extension is preferred when present; set TODASOV_PURE=1 to
force the numpy reference implementation (used by the parity tests and
the benchmark).  Both backends export the same two functions with
identical semantics.
"""

import os

if os.environ.get("TODASOV_PURE"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _flowkernel as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

monodromy_coeffs = _impl.monodromy_coeffs
tvec_and_grads = _impl.tvec_and_grads
backend = _impl.__name__.rsplit(".", 1)[-1]
