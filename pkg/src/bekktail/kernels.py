"""Backend selection for the hot loops.

The compiled Cython module is used when importable; otherwise, or when the
environment variable ``BEKKTAIL_BACKEND=python`` is set, the numpy fallback is
used.  Both expose ``sre_chunk`` and ``lyap_chunk`` with identical semantics.
"""
import logging
import os
from types import ModuleType

from . import _kernels_py

logger = logging.getLogger(__name__)


def _load_compiled() -> ModuleType | None:
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels


_compiled = _load_compiled()


def get_backend(name: str | None = None) -> ModuleType:
    """Return the kernel module for ``name`` ('cython', 'python' or None for the default)."""
    if name is None:
        name = os.environ.get("BEKKTAIL_BACKEND", "cython" if _compiled is not None else "python")
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built; run `pip install -e .` or use the python backend")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def backend_name() -> str:
    return "cython" if get_backend() is _compiled and _compiled is not None else "python"


def compiled_available() -> bool:
    return _compiled is not None
