"""Stepper backend selection.

Prefers the compiled extension and falls back to the NumPy core when the
build skipped it. Set HOMOLAB_BACKEND=python or HOMOLAB_BACKEND=cython to
force a choice (forcing cython raises if the extension is missing).
"""

from __future__ import annotations

import os

from . import _core_py


def _load():
    choice = os.environ.get("HOMOLAB_BACKEND", "").strip().lower()
    if choice not in ("", "python", "cython"):
        raise ValueError(f"unknown HOMOLAB_BACKEND value: {choice!r}")
    if choice == "python":
        return _core_py
    try:
        from . import _core_cy
    except ImportError:
        if choice == "cython":
            raise ImportError(
                "HOMOLAB_BACKEND=cython but the compiled core is not built"
            ) from None
        return _core_py
    return _core_cy


core = _load()
BACKEND = core.NAME


def available() -> tuple[str, ...]:
    """Names of the importable cores."""
    names = ["python"]
    try:
        from . import _core_cy  # noqa: F401
    except ImportError:
        pass
    else:
        names.insert(0, "cython")
    return tuple(names)
