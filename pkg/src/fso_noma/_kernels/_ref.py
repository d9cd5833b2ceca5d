"""Reference numeric kernels built on numpy/scipy ufuncs.

This is the pure-Python backend; `fso_noma._kernels._core` is the compiled
twin with identical signatures. Both must agree to floating-point roundoff,
which `tests/test_kernels.py` enforces whenever the extension is built.

All Bessel evaluation happens on the log scale through the exponentially
scaled `kve`, so densities stay finite far into both tails where K_nu itself
would overflow or underflow.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln, kve


_EULER_GAMMA = 0.5772156649015329


def log_kv(nu: float, x: np.ndarray) -> np.ndarray:
    """log K_nu(x) for real order nu and x > 0."""
    x = np.asarray(x, dtype=np.float64)
    out = np.log(kve(nu, x)) - x
    bad = ~np.isfinite(out) & (x < 1.0)
    if np.any(bad):
        # kve itself overflowed; use the small-argument expansion
        nua = abs(nu)
        xs = x[bad]
        if nua == 0.0:
            out[bad] = np.log(-np.log(0.5 * xs) - _EULER_GAMMA)
        else:
            out[bad] = gammaln(nua) - np.log(2.0) + nua * (np.log(2.0) - np.log(xs))
    return out


def intensity_logpdf(alpha: float, beta: float, x: np.ndarray) -> np.ndarray:
    """Log density of the unit-mean gamma-gamma intensity at x > 0."""
    x = np.asarray(x, dtype=np.float64)
    ab = alpha * beta
    half_sum = 0.5 * (alpha + beta)
    arg = 2.0 * np.sqrt(ab * x)
    return (np.log(2.0) + half_sum * np.log(ab) - gammaln(alpha) - gammaln(beta)
            + (half_sum - 1.0) * np.log(x) + log_kv(alpha - beta, arg))


def intensity_pdf(alpha: float, beta: float, x: np.ndarray) -> np.ndarray:
    return np.exp(intensity_logpdf(alpha, beta, x))


def h_logpdf(alpha: float, beta: float, h: np.ndarray) -> np.ndarray:
    """Log density of the squared intensity h = I**2 at h > 0."""
    h = np.asarray(h, dtype=np.float64)
    root = np.sqrt(h)
    return intensity_logpdf(alpha, beta, root) - np.log(2.0 * root)


def h_pdf(alpha: float, beta: float, h: np.ndarray) -> np.ndarray:
    return np.exp(h_logpdf(alpha, beta, h))


def sic_rate_matrix(h_ranked: np.ndarray, snr_coef: np.ndarray,
                    a_const: float, eps_phi: float) -> np.ndarray:
    """Per-user decode rates for a batch of rank-ordered channel draws.

    h_ranked: (n, K) squared intensities, non-increasing along axis 1.
    snr_coef: (K,) per-rank factor rho * mu_k^2 * 10**(-2(k-1)zeta/10).
    Rate k sees users k+1..K as interference; clamped at zero.
    """
    h_ranked = np.asarray(h_ranked, dtype=np.float64)
    snr_coef = np.asarray(snr_coef, dtype=np.float64)
    signal = h_ranked * snr_coef
    # interference: suffix sums over ranks below k
    tail = np.cumsum(signal[:, ::-1], axis=1)[:, ::-1]
    interference = tail - signal
    rates = 0.5 * np.log1p(signal / (interference + a_const)) - eps_phi
    return np.maximum(rates, 0.0)


def telescoped_sum_rate(h_ranked: np.ndarray, snr_coef: np.ndarray,
                        a_const: float, total_eps: float) -> np.ndarray:
    """Unclamped sum rate 0.5*log1p(sum_k coef_k h_k / A) - K*eps per draw."""
    h_ranked = np.asarray(h_ranked, dtype=np.float64)
    snr_coef = np.asarray(snr_coef, dtype=np.float64)
    return 0.5 * np.log1p(h_ranked @ snr_coef / a_const) - total_eps
