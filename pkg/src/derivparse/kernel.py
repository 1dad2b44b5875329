"""Kernel selection.

The compiled kernel (``_ckernel``) is used when it was built; otherwise the
pure-Python one. ``DERIVPARSE_KERNEL=python`` forces the fallback and
``DERIVPARSE_KERNEL=cython`` makes a missing extension an import error.
"""

import os

from . import _pykernel
from ._pykernel import (  # noqa: F401  (re-exported constants)
    ALT, CAT, DELAY, EMPTY, EPS, RED, TERM,
    F_AMB, F_EMPTY, F_EPS, F_LEAF, F_PAIR, F_TAG,
    R_APPEND, R_COMPOSE, R_LABEL, R_PREPEND,
    ST_EMPTY, ST_FINAL, ST_NULL,
    EMPTY_NODE, EPS_NODE, FOREST_EMPTY, FOREST_EPS, NONE,
    KernelError, UntiedPlaceholderError,
)

try:
    from . import _ckernel
except ImportError:  # extension not built
    _ckernel = None

KERNELS = {"python": _pykernel.Kernel}
if _ckernel is not None:
    KERNELS["cython"] = _ckernel.Kernel

_choice = os.environ.get("DERIVPARSE_KERNEL", "").strip().lower()
if _choice == "cython" and _ckernel is None:
    raise ImportError("DERIVPARSE_KERNEL=cython but derivparse._ckernel is not built")
if _choice in KERNELS:
    DEFAULT_KERNEL = _choice
else:
    DEFAULT_KERNEL = "cython" if _ckernel is not None else "python"


def get_kernel(name=None):
    """Return a fresh kernel instance, by name or the import-time default."""
    name = name or DEFAULT_KERNEL
    try:
        return KERNELS[name]()
    except KeyError:
        raise ValueError("unknown or unavailable kernel %r (have: %s)"
                         % (name, ", ".join(sorted(KERNELS)))) from None
