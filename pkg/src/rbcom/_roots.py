"""Vectorised bisection used by every implicit solve in the package."""

import numpy as np

from rbcom.errors import NumericalFailure

_EPS = np.finfo(float).eps


def bisect_decreasing(func, lo, hi, *, rtol=4 * _EPS, maxiter=200, geometric=False):
    """Find roots of elementwise-decreasing ``func`` inside ``[lo, hi]``.

    The caller guarantees ``func >= 0`` at ``lo`` and ``func <= 0`` at ``hi``
    (endpoints are never evaluated, so singular limits are fine). Iterates
    until every bracket is narrower than ``rtol * hi`` or has collapsed to
    adjacent floats. With ``geometric=True`` the midpoint is ``sqrt(lo*hi)``,
    which converges in relative terms for roots spanning many decades.

    Returns ``(root, lo, hi, iterations)``; ``root`` is the final midpoint.
    """
    lo, hi = np.broadcast_arrays(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
    lo = lo.copy()
    hi = hi.copy()
    for it in range(1, maxiter + 1):
        mid = np.sqrt(lo * hi) if geometric else 0.5 * (lo + hi)
        val = func(mid)
        above = val > 0.0
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
        exact = val == 0.0
        lo = np.where(exact, mid, lo)
        width = hi - lo
        if np.all((width <= rtol * np.abs(hi)) | (width <= 2 * _EPS * np.abs(hi))):
            root = np.sqrt(lo * hi) if geometric else 0.5 * (lo + hi)
            return root, lo, hi, it
    raise NumericalFailure(
        f"bisection did not converge in {maxiter} iterations", bracket=(lo, hi)
    )
