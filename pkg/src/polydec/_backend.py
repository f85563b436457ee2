"""Kernel backend selection.

The hot numeric loops (check-polytope projections, decoder sweeps) exist in
two implementations: numba @njit scalar kernels and a vectorized pure-numpy
path. ``POLYDEC_BACKEND`` picks one:

  POLYDEC_BACKEND=numba   force numba (ImportError if unavailable)
  POLYDEC_BACKEND=numpy   force the pure-numpy fallback
  unset / auto            numba when importable, else numpy

The choice is made once at import time; ``benchmarks/backend_bench.py``
compares the two by launching subprocesses with the flag set.
"""

import os

_choice = os.environ.get("POLYDEC_BACKEND", "auto").strip().lower()

if _choice == "numpy":
    USE_NUMBA = False
elif _choice == "numba":
    import numba  # noqa: F401  -- fail loudly if forced but missing

    USE_NUMBA = True
elif _choice == "auto":
    try:
        import numba  # noqa: F401

        USE_NUMBA = True
    except ImportError:
        USE_NUMBA = False
else:
    raise RuntimeError(
        f"POLYDEC_BACKEND={_choice!r} not understood (use 'numba', 'numpy' or 'auto')"
    )

BACKEND_NAME = "numba" if USE_NUMBA else "numpy"


def kernels():
    """Return the selected kernel module (lazy import to avoid jit cost on tools
    that only touch file I/O)."""
    if USE_NUMBA:
        from . import _kernels_numba as mod
    else:
        from . import _kernels_numpy as mod
    return mod
