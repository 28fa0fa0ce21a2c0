"""Select the kernel backend at import time.

Set ``SIXR_BACKEND=python`` to force the numpy fallback even when the
compiled extension is available.
"""
import os

from . import _pykernels as python_kernels

try:
    from . import _ckernels as compiled_kernels
except ImportError:  # extension not built
    compiled_kernels = None

if os.environ.get("SIXR_BACKEND", "").lower() == "python" or compiled_kernels is None:
    kernels = python_kernels
else:
    kernels = compiled_kernels

BACKEND = kernels.BACKEND


def available():
    """Names of the importable backends."""
    names = ["python"]
    if compiled_kernels is not None:
        names.insert(0, "cython")
    return names


def get(name=None):
    """Kernel module by name; ``None`` returns the active one."""
    if name is None:
        return kernels
    if name == "python":
        return python_kernels
    if name == "cython":
        if compiled_kernels is None:
            raise RuntimeError("compiled kernels are not built")
        return compiled_kernels
    raise ValueError(f"unknown backend {name!r}")
