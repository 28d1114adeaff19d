"""Hot-kernel backend selection.

The compiled Cython extension is preferred when importable; the pure
numpy/Python implementation is the fallback. Set ``QS_PURE=1`` to force the
fallback (used by the benchmark and by CI on platforms without a compiler).
"""

from __future__ import annotations

import os

from . import pure

BACKEND = "pure"
elasticity_profile = pure.elasticity_profile
ascent_crra = pure.ascent_crra
ascent_generic = pure.ascent_generic

if not os.environ.get("QS_PURE"):
    try:
        from . import _speedups

        elasticity_profile = _speedups.elasticity_profile
        ascent_crra = _speedups.ascent_crra
        BACKEND = "compiled"
    except ImportError:
        pass
