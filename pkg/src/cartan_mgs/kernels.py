"""Kernel backend selection: compiled extension when available, numpy otherwise.

Set ``CARTAN_MGS_PURE=1`` to force the pure fallback.  Both backends implement
the same exact arithmetic; ``benchmarks/bench_kernels.py`` compares them.
"""

import os

if os.environ.get("CARTAN_MGS_PURE") == "1":
    from . import _pykernels as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pykernels as _impl

BACKEND = _impl.BACKEND
ad_block = _impl.ad_block
rref_insert_batch = _impl.rref_insert_batch
