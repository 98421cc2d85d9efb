"""Hot-loop kernels with selectable backends.

The numba backend compiles the inner loops; the numpy backend is a pure
fallback with bit-identical output.  Selection order: an explicit
``backend=`` argument on a solver, else the ``COLLEGEAPP_BACKEND``
environment variable (``numba`` or ``numpy``), else numba when importable.
"""

from __future__ import annotations

import os

from . import np_impl

BACKEND_ENV = "COLLEGEAPP_BACKEND"

try:
    from . import nb_impl

    _NUMBA_IMPORT_ERROR = None
except ImportError as exc:  # pragma: no cover - depends on environment
    nb_impl = None
    _NUMBA_IMPORT_ERROR = exc


def available_backends() -> tuple:
    return ("numba", "numpy") if nb_impl is not None else ("numpy",)


def default_backend() -> str:
    env = os.environ.get(BACKEND_ENV, "").strip().lower()
    if env:
        if env not in ("numba", "numpy"):
            raise ValueError(f"{BACKEND_ENV} must be 'numba' or 'numpy', got {env!r}")
        if env == "numba" and nb_impl is None:
            raise ValueError(f"{BACKEND_ENV}=numba but numba failed to import: {_NUMBA_IMPORT_ERROR}")
        return env
    return "numba" if nb_impl is not None else "numpy"


def active(backend: str | None = None):
    """Return the kernel module for ``backend`` (or the default)."""
    name = backend if backend is not None else default_backend()
    if name == "numpy":
        return np_impl
    if name == "numba":
        if nb_impl is None:
            raise ValueError(f"numba backend unavailable: {_NUMBA_IMPORT_ERROR}")
        return nb_impl
    raise ValueError(f"unknown backend {name!r}")
