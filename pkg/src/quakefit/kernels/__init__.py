"""Kernel backend selection.

The compiled Cython kernel is preferred when its extension module built;
otherwise the numpy fallback is used. The choice happens at import time
and can be forced with the QUAKEFIT_KERNEL environment variable
("compiled" or "python") or, for benchmarking and tests, with
:func:`set_backend`.
"""

import os

from .. import errors
from . import _python

try:
    from . import _compiled
except ImportError:
    _compiled = None

HAVE_COMPILED = _compiled is not None

_BACKENDS = {"python": _python}
if HAVE_COMPILED:
    _BACKENDS["compiled"] = _compiled


def _initial_backend():
    forced = os.environ.get("QUAKEFIT_KERNEL", "").strip().lower()
    if forced:
        if forced not in _BACKENDS:
            raise errors.ConfigError(
                f"QUAKEFIT_KERNEL={forced!r} unavailable; choices: {sorted(_BACKENDS)}"
            )
        return forced
    return "compiled" if HAVE_COMPILED else "python"


_active = _initial_backend()


def active_backend() -> str:
    """Name of the backend in use: "compiled" or "python"."""
    return _active


def available_backends():
    return sorted(_BACKENDS)


def set_backend(name: str) -> None:
    global _active
    if name not in _BACKENDS:
        raise errors.ConfigError(
            f"unknown kernel backend {name!r}; choices: {sorted(_BACKENDS)}"
        )
    _active = name


def forward_batch(params, sizes, X):
    """Dispatch a batch forward pass to the active backend."""
    return _BACKENDS[_active].forward_batch(params, sizes, X)
