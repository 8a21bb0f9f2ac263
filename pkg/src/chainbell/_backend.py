"""Kernel backend selection.

Prefers the compiled extension when it imported cleanly, otherwise uses the
numpy fallback. Both expose the same functions with bit-identical results, so
the choice never affects outputs, only speed. Set CHAINBELL_DISABLE_EXTENSION
to force the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_fallback

if os.environ.get("CHAINBELL_DISABLE_EXTENSION"):
    kernels = _kernels_fallback
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        kernels = _kernels_fallback


def backend_name() -> str:
    return kernels.BACKEND_NAME


map_outcomes = kernels.map_outcomes
count_outcomes = kernels.count_outcomes
lhv_scan = kernels.lhv_scan
