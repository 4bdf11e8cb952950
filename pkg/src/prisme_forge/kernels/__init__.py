"""Hot text kernels with a compiled core and a pure-Python fallback.

The compiled extension is selected at import time when available; set the
environment variable ``PRISME_FORGE_PURE=1`` to force the fallback.
``IMPLEMENTATION`` reports which side is active.
"""

import os

from . import pykernels

if os.environ.get("PRISME_FORGE_PURE"):
    _impl = pykernels
    COMPILED = False
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        COMPILED = True
    except ImportError:
        _impl = pykernels
        COMPILED = False

IMPLEMENTATION = "compiled" if COMPILED else "pure-python"

char_ngram_counts = _impl.char_ngram_counts
rank_order_distance = _impl.rank_order_distance
token_ngram_counts = _impl.token_ngram_counts
fnv1a64 = _impl.fnv1a64

__all__ = [
    "COMPILED",
    "IMPLEMENTATION",
    "char_ngram_counts",
    "fnv1a64",
    "pykernels",
    "rank_order_distance",
    "token_ngram_counts",
]
