# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled rate-statistics kernel; mirrors eekit._kernels_py.rate_stats."""
from libc.math cimport log1p, exp, expm1, log, INFINITY, isfinite
from libc.stdlib cimport malloc, free


def rate_stats(const double[::1] lam, double rho, double beta, const double[::1] mu=None):
    cdef Py_ssize_t n = lam.shape[0], s
    cdef double *buf
    cdef double u, x, xmin = INFINITY, xmax = -INFINITY, sx = 0.0, mean_x, vx = 0.0, d
    cdef double sw = 0.0, mean_w, vw = 0.0, lme = 0.0, rel_var = 0.0
    cdef bint has_mu = mu is not None, small
    if n == 0:
        raise ValueError("empty sample")
    if has_mu and mu.shape[0] != n:
        raise ValueError("mu and lam lengths differ")
    buf = <double *> malloc(n * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    try:
        for s in range(n):
            u = rho * lam[s]
            if has_mu:
                u = u * mu[s]
            x = log1p(u)
            if not isfinite(x):
                raise FloatingPointError("non-finite rate sample")
            buf[s] = x
            sx += x
            if x < xmin:
                xmin = x
            if x > xmax:
                xmax = x
        mean_x = sx / n
        for s in range(n):
            d = buf[s] - mean_x
            vx += d * d
        vx /= n
        if beta > 0:
            # narrow exponent range: accumulate w - 1 to keep precision as beta -> 0
            small = beta * (xmax - xmin) < 1.0
            for s in range(n):
                if small:
                    x = expm1(-beta * (buf[s] - xmin))
                else:
                    x = exp(-beta * (buf[s] - xmin))
                buf[s] = x
                sw += x
            mean_w = sw / n
            for s in range(n):
                d = buf[s] - mean_w
                vw += d * d
            vw /= n
            if small:
                lme = -beta * xmin + log1p(mean_w)
                mean_w += 1.0
            else:
                lme = -beta * xmin + log(mean_w)
            rel_var = vw / (mean_w * mean_w)
    finally:
        free(buf)
    return mean_x, vx, lme, rel_var
