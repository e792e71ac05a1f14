"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; otherwise
the NumPy/SciPy twin is used.  ``MANIFOLD_MEANS_BACKEND`` overrides the
choice ("compiled", "python", or "auto").  The selected module is held
in the module attribute ``kernels`` so tests can swap it out.
"""

from __future__ import annotations

import os

from . import _kernels_py

_NAMES = ("python", "compiled")


def _load_compiled():
    from . import _kernels_cy  # noqa: PLC0415 -- optional extension

    return _kernels_cy


def get_kernels(name: str):
    """Return the kernel module for an explicit backend name."""
    if name == "python":
        return _kernels_py
    if name == "compiled":
        return _load_compiled()
    raise ValueError(f"unknown backend {name!r}, expected one of {_NAMES}")


def available_backends() -> tuple[str, ...]:
    """Names of the backends that import on this installation."""
    try:
        _load_compiled()
    except ImportError:
        return ("python",)
    return _NAMES


def _select():
    forced = os.environ.get("MANIFOLD_MEANS_BACKEND", "auto").strip().lower()
    if forced in ("", "auto"):
        try:
            return _load_compiled(), "compiled"
        except ImportError:
            return _kernels_py, "python"
    if forced in _NAMES:
        return get_kernels(forced), forced
    raise ValueError(
        f"MANIFOLD_MEANS_BACKEND={forced!r} not understood; "
        f"expected 'auto' or one of {_NAMES}"
    )


kernels, BACKEND = _select()


def backend_name() -> str:
    """Name of the backend currently answering kernel calls."""
    return "compiled" if kernels is not _kernels_py else "python"
