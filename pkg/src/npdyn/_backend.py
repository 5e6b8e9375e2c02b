"""Select the compiled kernels when importable, else the numpy fallback.

Set ``NPDYN_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _fallback

if os.environ.get("NPDYN_PURE_PYTHON"):
    kernels = _fallback
else:
    try:
        from . import _kernels as kernels
    except ImportError:
        kernels = _fallback

BACKEND = "cython" if kernels is not _fallback else "python"
