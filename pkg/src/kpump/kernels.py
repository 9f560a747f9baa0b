"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise, or when the
``KPUMP_PURE_PYTHON`` environment variable is set, the pure-Python twin is
used. Both produce bit-identical results, so plans do not depend on the
backend. Call sites go through this module's attributes so that
:func:`use_backend` can switch implementations at runtime.
"""
from __future__ import annotations

import contextlib
import logging
import os

from . import _pykernels

log = logging.getLogger(__name__)

try:
    from . import _kernels as _compiled
except ImportError:  # pragma: no cover - depends on build environment
    _compiled = None

_FUNCS = ("disc_free_many", "capsule_free_many", "fill_pumped", "edge_plan_color",
          "conflict_matrix", "greedy_sets", "splitmix64")

BACKEND = "python"


def available_backends() -> list[str]:
    return ["python"] + (["compiled"] if _compiled is not None else [])


def set_backend(name: str) -> None:
    global BACKEND
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        impl = _compiled
    elif name == "python":
        impl = _pykernels
    else:
        raise ValueError(f"unknown backend {name!r}")
    g = globals()
    for fn in _FUNCS:
        g[fn] = getattr(impl, fn)
    BACKEND = name


@contextlib.contextmanager
def use_backend(name: str):
    prev = BACKEND
    set_backend(name)
    try:
        yield
    finally:
        set_backend(prev)


if _compiled is not None and not os.environ.get("KPUMP_PURE_PYTHON"):
    set_backend("compiled")
else:
    if _compiled is None:
        log.debug("compiled kernels unavailable; using pure-Python fallback")
    set_backend("python")
