"""Backend selection for the Monte Carlo inner loop.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``EEKIT_PURE_PYTHON`` is set, the numpy version runs.
Both return the same statistics up to floating-point summation order.
"""
import os

import numpy as np

from . import _kernels_py

if os.environ.get("EEKIT_PURE_PYTHON"):
    _compiled = None
else:
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"


def rate_stats(lam, rho, beta, mu=None):
    """See :func:`eekit._kernels_py.rate_stats`."""
    if _compiled is None:
        return _kernels_py.rate_stats(lam, rho, beta, mu)
    lam = np.ascontiguousarray(lam, dtype=float)
    if mu is not None:
        mu = np.ascontiguousarray(mu, dtype=float)
    return _compiled.rate_stats(lam, float(rho), float(beta), mu)
