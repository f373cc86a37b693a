"""Backend selection for the hot kernels.

The compiled extension ``bcmap._core`` is used when importable; otherwise the
numpy implementation in ``bcmap._fallback`` is used. Setting the environment
variable ``BCMAP_PURE_PYTHON=1`` forces the fallback.
"""
import os

import numpy as np

from . import _fallback

if os.environ.get("BCMAP_PURE_PYTHON", "") not in ("", "0"):
    _core = None
else:
    try:
        from . import _core
    except ImportError:  # extension not built
        _core = None

BACKENDS = {"python": _fallback}
if _core is not None:
    BACKENDS["compiled"] = _core

BACKEND = "compiled" if _core is not None else "python"

# below this pseudohyperbolic distance to a zero, F' switches to the product rule
NEAR_ZERO_TOL = 1e-6


def _impl(backend):
    return BACKENDS[backend or BACKEND]


def blaschke_eval(zeros, z, gap=None, phase=1.0 + 0.0j, backend=None):
    """Return ``(F, F', 1 - |F|^2)`` at the points ``z`` (1-d arrays)."""
    zeros = np.ascontiguousarray(zeros, dtype=complex).ravel()
    z = np.ascontiguousarray(z, dtype=complex).ravel()
    if gap is None:
        gap = 1.0 - np.abs(z)
    gap = np.ascontiguousarray(np.broadcast_to(gap, z.shape), dtype=float)
    return _impl(backend).blaschke_eval(zeros, z, gap, complex(phase), NEAR_ZERO_TOL)


def pairwise_min_omrho2(w, om2, backend=None):
    w = np.ascontiguousarray(w, dtype=complex).ravel()
    om2 = np.ascontiguousarray(om2, dtype=float).ravel()
    return float(_impl(backend).pairwise_min_omrho2(w, om2))


def pairwise_max_rho2(w, backend=None):
    w = np.ascontiguousarray(w, dtype=complex).ravel()
    return float(_impl(backend).pairwise_max_rho2(w))


def winding_numbers(curve, q, backend=None):
    curve = np.ascontiguousarray(curve, dtype=complex).ravel()
    q = np.ascontiguousarray(q, dtype=complex).ravel()
    return _impl(backend).winding_numbers(curve, q)
