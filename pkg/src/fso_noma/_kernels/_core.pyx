# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the reference kernels in _ref.py.

Same signatures, same math; the win is fused loops without temporary
arrays, which matters for the many small batches the adaptive quadrature
feeds through the gamma-gamma densities.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs, isfinite, lgamma, log, log1p, sqrt

from scipy.special.cython_special cimport kve

cnp.import_array()

cdef double _EULER_GAMMA = 0.5772156649015329
cdef double _LOG2 = 0.6931471805599453


cdef inline double _log_kv_scalar(double nu, double x) noexcept nogil:
    cdef double v = log(kve(nu, x)) - x
    if isfinite(v) or x >= 1.0:
        return v
    # kve overflowed at tiny argument; small-argument expansion
    nu = fabs(nu)
    if nu == 0.0:
        return log(-log(0.5 * x) - _EULER_GAMMA)
    return lgamma(nu) - _LOG2 + nu * (_LOG2 - log(x))


cdef inline double _intensity_logpdf_scalar(double alpha, double beta,
                                            double lognorm, double x) noexcept nogil:
    cdef double half_sum = 0.5 * (alpha + beta)
    return (lognorm + (half_sum - 1.0) * log(x)
            + _log_kv_scalar(alpha - beta, 2.0 * sqrt(alpha * beta * x)))


cdef inline double _lognorm(double alpha, double beta) noexcept nogil:
    return (_LOG2 + 0.5 * (alpha + beta) * log(alpha * beta)
            - lgamma(alpha) - lgamma(beta))


def log_kv(double nu, x):
    arr = np.ascontiguousarray(x, dtype=np.float64)
    shape = arr.shape
    cdef double[::1] xv = arr.reshape(-1)
    out = np.empty(xv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    for i in range(xv.shape[0]):
        ov[i] = _log_kv_scalar(nu, xv[i])
    return out.reshape(shape)


def intensity_logpdf(double alpha, double beta, x):
    arr = np.ascontiguousarray(x, dtype=np.float64)
    shape = arr.shape
    cdef double[::1] xv = arr.reshape(-1)
    out = np.empty(xv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef double ln = _lognorm(alpha, beta)
    cdef Py_ssize_t i
    for i in range(xv.shape[0]):
        ov[i] = _intensity_logpdf_scalar(alpha, beta, ln, xv[i])
    return out.reshape(shape)


def intensity_pdf(double alpha, double beta, x):
    arr = np.ascontiguousarray(x, dtype=np.float64)
    shape = arr.shape
    cdef double[::1] xv = arr.reshape(-1)
    out = np.empty(xv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef double ln = _lognorm(alpha, beta)
    cdef Py_ssize_t i
    for i in range(xv.shape[0]):
        ov[i] = exp(_intensity_logpdf_scalar(alpha, beta, ln, xv[i]))
    return out.reshape(shape)


def h_logpdf(double alpha, double beta, h):
    arr = np.ascontiguousarray(h, dtype=np.float64)
    shape = arr.shape
    cdef double[::1] hv = arr.reshape(-1)
    out = np.empty(hv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef double ln = _lognorm(alpha, beta)
    cdef double root
    cdef Py_ssize_t i
    for i in range(hv.shape[0]):
        root = sqrt(hv[i])
        ov[i] = _intensity_logpdf_scalar(alpha, beta, ln, root) - log(2.0 * root)
    return out.reshape(shape)


def h_pdf(double alpha, double beta, h):
    arr = np.ascontiguousarray(h, dtype=np.float64)
    shape = arr.shape
    cdef double[::1] hv = arr.reshape(-1)
    out = np.empty(hv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef double ln = _lognorm(alpha, beta)
    cdef double root
    cdef Py_ssize_t i
    for i in range(hv.shape[0]):
        root = sqrt(hv[i])
        ov[i] = exp(_intensity_logpdf_scalar(alpha, beta, ln, root) - log(2.0 * root))
    return out.reshape(shape)


def sic_rate_matrix(h_ranked, snr_coef, double a_const, double eps_phi):
    cdef double[:, ::1] h = np.ascontiguousarray(h_ranked, dtype=np.float64)
    cdef double[::1] coef = np.ascontiguousarray(snr_coef, dtype=np.float64)
    cdef Py_ssize_t n = h.shape[0], K = h.shape[1]
    out = np.empty((n, K), dtype=np.float64)
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t i, k
    cdef double tail, s, r
    for i in range(n):
        tail = 0.0
        for k in range(K - 1, -1, -1):
            s = coef[k] * h[i, k]
            r = 0.5 * log1p(s / (tail + a_const)) - eps_phi
            ov[i, k] = r if r > 0.0 else 0.0
            tail += s
    return out


def telescoped_sum_rate(h_ranked, snr_coef, double a_const, double total_eps):
    cdef double[:, ::1] h = np.ascontiguousarray(h_ranked, dtype=np.float64)
    cdef double[::1] coef = np.ascontiguousarray(snr_coef, dtype=np.float64)
    cdef Py_ssize_t n = h.shape[0], K = h.shape[1]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, k
    cdef double acc
    for i in range(n):
        acc = 0.0
        for k in range(K):
            acc += coef[k] * h[i, k]
        ov[i] = 0.5 * log1p(acc / a_const) - total_eps
    return out
