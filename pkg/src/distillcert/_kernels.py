"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; setting
DISTILLCERT_NO_EXT=1 in the environment before import forces the numpy
fallback. Both backends implement the same `combo_sigma2` contract.
"""

import os

from . import _kernels_py

if os.environ.get("DISTILLCERT_NO_EXT"):
    _impl = _kernels_py
else:
    try:
        from . import _fastsv as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND
combo_sigma2 = _impl.combo_sigma2
