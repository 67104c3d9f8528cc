"""Hot-kernel dispatch: the compiled extension when importable, else numpy.

Set ``ISAKIT_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from isakit import _pykernels

BACKEND = "python"

if os.environ.get("ISAKIT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from isakit import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
else:
    _impl = _pykernels

smo_solve = _impl.smo_solve
dbscan = _impl.dbscan

__all__ = ["BACKEND", "smo_solve", "dbscan"]
