"""Hot inner loops, with a numba-compiled and a pure-numpy implementation.

The numba path is used when numba imports cleanly and the environment
variable ``BSPSK_DISABLE_NUMBA`` is unset (or ``0``). Both paths expose the
same four functions and are checked against each other in the test suite::

    sweep_phase(t, omega_c, K, K_f, T_c) -> phase (rad)
    dtft_magnitude(x, w) -> |sum x[n] exp(-j w n)| / N for each w (rad/sample)
    tapped_delay(x, delays, gains) -> y, len(x) + max(delays)
    integrate_dump(x, ref, n_per) -> block sums of x * ref
"""

import os

from . import _numpy as numpy_impl

numba_impl = None
_reason = "disabled by BSPSK_DISABLE_NUMBA"
if os.environ.get("BSPSK_DISABLE_NUMBA", "0").strip().lower() in ("", "0", "false", "no"):
    try:
        from . import _numba as numba_impl
    except ImportError as exc:  # pragma: no cover - depends on environment
        _reason = f"numba unavailable ({exc})"

if numba_impl is not None:
    BACKEND = "numba"
    _impl = numba_impl
else:
    BACKEND = "numpy"
    _impl = numpy_impl

sweep_phase = _impl.sweep_phase
dtft_magnitude = _impl.dtft_magnitude
tapped_delay = _impl.tapped_delay
integrate_dump = _impl.integrate_dump


def backend_info():
    """Return a short description of the active kernel backend."""
    if BACKEND == "numba":
        return "numba"
    return f"numpy ({_reason})"


__all__ = [
    "BACKEND",
    "backend_info",
    "dtft_magnitude",
    "integrate_dump",
    "numba_impl",
    "numpy_impl",
    "sweep_phase",
    "tapped_delay",
]
