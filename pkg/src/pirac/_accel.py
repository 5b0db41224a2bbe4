"""Backend selection for the hot kernels.

Set ``PIRAC_DISABLE_NUMBA=1`` to force the pure-numpy paths. When numba is
not importable the numpy paths are used regardless of the flag.
"""

import os

_FALSY = {"", "0", "false", "no", "off"}

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]

        def decorator(func):
            return func

        return decorator


USE_NUMBA = NUMBA_AVAILABLE and (
    os.environ.get("PIRAC_DISABLE_NUMBA", "0").strip().lower() in _FALSY
)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
