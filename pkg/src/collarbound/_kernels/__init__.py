"""Hot numerical kernels with a compiled core and a numpy fallback.

The Cython extension ``_ckernels`` is used when it has been built; otherwise, or
when ``COLLARBOUND_PURE_PYTHON`` is set to a non-empty value other than ``0``,
the numpy versions in ``_pykernels`` are used. ``BACKEND`` names the choice.
"""

from __future__ import annotations

import os

from . import _pykernels

_force_pure = os.environ.get("COLLARBOUND_PURE_PYTHON", "") not in ("", "0")

if _force_pure:
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

ellipsoid_project = _impl.ellipsoid_project
greedy_pack = _impl.greedy_pack

__all__ = ["BACKEND", "ellipsoid_project", "greedy_pack"]
