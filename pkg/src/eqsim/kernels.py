"""Kernel backend selection.

The compiled ``_kernels`` extension is used when it imports; otherwise the
numpy implementation in ``_kernels_py`` is used. Set ``EQSIM_PURE_PYTHON=1``
to force the fallback.
"""
import os

from . import _kernels_py

if os.environ.get("EQSIM_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "cython"

apply_pauli = _impl.apply_pauli
rotate_vec = _impl.rotate_vec
rotate_dm = _impl.rotate_dm
expect_vec = _impl.expect_vec
expect_dm = _impl.expect_dm
depolarize = _impl.depolarize
