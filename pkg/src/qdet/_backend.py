"""Kernel backend selection.

The compiled ``_core`` extension is used when importable; otherwise, or when
the environment variable ``QDET_PURE_PYTHON`` is set to a non-empty value,
the numpy kernels in ``_fallback`` are used.
"""
import os

from . import _fallback

if os.environ.get("QDET_PURE_PYTHON"):
    kernels = _fallback
else:
    try:
        from . import _core as kernels
    except ImportError:
        kernels = _fallback

BACKEND = kernels.NAME


def available_backends():
    """Mapping of backend name to kernel module, for benchmarks and tests."""
    found = {_fallback.NAME: _fallback}
    try:
        from . import _core
    except ImportError:
        return found
    found[_core.NAME] = _core
    return found
