"""Backend selection for the circuit kernels.

The compiled extension is used when importable; ``SEEDSYNTH_PURE=1``
forces the numpy fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("SEEDSYNTH_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py

unitary = _impl.unitary
cost_grad = _impl.cost_grad

__all__ = ["BACKEND", "unitary", "cost_grad"]
