"""Numba detection and backend selection.

Hot kernels exist twice: a compiled loop version (numba) and a vectorised
numpy version.  ``SEGRE_NUMBA=0`` in the environment forces the numpy path;
otherwise numba is used whenever it imports cleanly.
"""
import os
import warnings

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on the environment
    numba = None
    HAVE_NUMBA = False

_flag = os.environ.get("SEGRE_NUMBA", "1").strip().lower()
USE_NUMBA = HAVE_NUMBA and _flag not in ("0", "false", "no", "off")

if _flag not in ("0", "false", "no", "off") and not HAVE_NUMBA:  # pragma: no cover
    warnings.warn("numba is not importable; falling back to numpy kernels")


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, otherwise a no-op decorator."""
    if HAVE_NUMBA:
        kwargs.setdefault("cache", True)
        kwargs.setdefault("nogil", True)
        return numba.njit(*args, **kwargs)

    def wrap(func):
        return func

    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return wrap


def backend_name(backend=None):
    """Resolve an explicit backend request ("numba" / "numpy" / None)."""
    if backend is None:
        return "numba" if USE_NUMBA else "numpy"
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend
