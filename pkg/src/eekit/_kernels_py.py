"""Pure-numpy rate statistics; the fallback for the compiled ``_kernels``."""
import numpy as np


def rate_stats(lam, rho, beta, mu=None):
    """Moments of ``x = ln(1 + mu * rho * lam)`` over the samples.

    Returns ``(mean_x, var_x, lme, rel_var)`` where ``lme`` is
    ``ln mean(exp(-beta * x))`` computed with a max shift and ``rel_var`` is
    ``var(w) / mean(w)^2`` of the shifted weights ``w``.  Both are zero when
    ``beta == 0``.  When the shifted exponents span less than one the weights
    are accumulated as ``expm1`` and the log taken with ``log1p``, which keeps
    full relative precision as ``beta -> 0``.
    """
    lam = np.asarray(lam, dtype=float)
    if lam.size == 0:
        raise ValueError("empty sample")
    u = rho * lam if mu is None else rho * lam * np.asarray(mu, dtype=float)
    x = np.log1p(u)
    if not np.all(np.isfinite(x)):
        raise FloatingPointError("non-finite rate sample")
    mean_x = x.mean()
    var_x = np.mean((x - mean_x) ** 2)
    if beta <= 0:
        return float(mean_x), float(var_x), 0.0, 0.0
    xmin = x.min()
    z = -beta * (x - xmin)
    if beta * (x.max() - xmin) < 1.0:
        v = np.expm1(z)
        mean_v = v.mean()
        var_w = np.mean((v - mean_v) ** 2)
        mean_w = 1.0 + mean_v
        log_mean_w = np.log1p(mean_v)
    else:
        w = np.exp(z)
        mean_w = w.mean()
        var_w = np.mean((w - mean_w) ** 2)
        log_mean_w = np.log(mean_w)
    return float(mean_x), float(var_x), float(-beta * xmin + log_mean_w), float(var_w / mean_w**2)
