"""Backend selection for the hot kernels.

``EBV_BACKEND`` picks the implementation:

* ``auto`` (default): numba-compiled kernels when numba imports, else numpy.
* ``numba``: require numba; raise if it is missing.
* ``numpy``: force the pure-numpy fallback path.

All kernels run single-threaded with a fixed accumulation order in either
backend, so repeated calls are bit-identical for identical inputs.
"""

import os
import warnings

_requested = os.environ.get("EBV_BACKEND", "auto").strip().lower()
if _requested not in ("auto", "numba", "numpy"):
    warnings.warn(f"EBV_BACKEND={_requested!r} not recognized; using 'auto'")
    _requested = "auto"

HAVE_NUMBA = False
if _requested in ("auto", "numba"):
    try:
        import numba  # noqa: F401

        HAVE_NUMBA = True
    except ImportError:
        if _requested == "numba":
            raise ImportError("EBV_BACKEND=numba but numba is not installed")

USE_NUMBA = HAVE_NUMBA and _requested in ("auto", "numba")
BACKEND = "numba" if USE_NUMBA else "numpy"


def njit_kernel(func):
    """Compile ``func`` with the project-wide numba settings.

    fastmath stays off and loops stay serial: accumulation order is part of
    the determinism contract.
    """
    from numba import njit

    return njit(cache=True, fastmath=False)(func)
