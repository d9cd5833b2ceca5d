"""Order statistics of the squared intensities that set the SIC decode order.

Rank 1 is the strongest user: with K i.i.d. squared intensities sorted
descending, the rank-k marginal density is

    K!/((k-1)!(K-k)!) * F(h)**(K-k) * (1-F(h))**(k-1) * f(h)

and the joint density of the whole ordered vector is K! * prod f(h_i) on
the non-increasing region (zero off it, so integrals over unrestricted
domains stay correct).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .channel import GammaGammaDist, h_cdf, sample_intensity


@dataclass(frozen=True)
class OrderedChannelSet:
    """K i.i.d. squared-intensity variables drawn from a common base."""

    count: int
    base: GammaGammaDist

    def __post_init__(self):
        if not (isinstance(self.count, int) and self.count >= 1):
            raise ValueError(f"count must be a positive integer, got {self.count}")


def _check_rank(oset: OrderedChannelSet, rank: int) -> None:
    if not 1 <= rank <= oset.count:
        raise ValueError(f"rank {rank} out of range 1..{oset.count}")


def ordered_marginal_pdf(oset: OrderedChannelSet, rank: int, h):
    """Density of the rank-th largest squared intensity (rank 1 strongest)."""
    _check_rank(oset, rank)
    arr = np.atleast_1d(np.asarray(h, dtype=np.float64))
    scalar = np.ndim(h) == 0
    if np.any(~(arr > 0.0)):
        raise ValueError("h must be strictly positive")
    k, n = rank, oset.count
    f = _kernels.h_pdf(oset.base.alpha, oset.base.beta, arr)
    cdf = np.atleast_1d(h_cdf(oset.base, arr))
    coeff = math.factorial(n) / (math.factorial(k - 1) * math.factorial(n - k))
    out = coeff * cdf ** (n - k) * (1.0 - cdf) ** (k - 1) * f
    return float(out[0]) if scalar else out


def ordered_marginal_cdf(oset: OrderedChannelSet, rank: int, h):
    """Distribution of the rank-th largest value, via the binomial tail sum.

    P(h_(rank) <= x) = sum_{j=n-rank+1..n} C(n,j) F**j (1-F)**(n-j):
    at least n-rank+1 of the n draws fall at or below x.
    """
    _check_rank(oset, rank)
    arr = np.atleast_1d(np.asarray(h, dtype=np.float64))
    scalar = np.ndim(h) == 0
    cdf = np.atleast_1d(h_cdf(oset.base, arr))
    n, k = oset.count, rank
    out = np.zeros_like(cdf)
    for j in range(n - k + 1, n + 1):
        out += math.comb(n, j) * cdf ** j * (1.0 - cdf) ** (n - j)
    np.clip(out, 0.0, 1.0, out=out)
    return float(out[0]) if scalar else out


def ordered_joint_pdf(oset: OrderedChannelSet, values):
    """Joint density of the full ordered vector; 0 off the ordered region.

    `values` has shape (..., K); the last axis holds h_1 >= ... >= h_K.
    Unordered points return 0 rather than raising, so the function can be
    integrated over unrestricted domains.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape[-1] != oset.count:
        raise ValueError(f"expected last axis of size {oset.count}, got {arr.shape}")
    if np.any(~(arr > 0.0)):
        raise ValueError("values must be strictly positive")
    logf = _kernels.h_logpdf(oset.base.alpha, oset.base.beta, arr)
    dens = np.exp(logf.sum(axis=-1) + math.lgamma(oset.count + 1))
    ordered = np.all(arr[..., :-1] >= arr[..., 1:], axis=-1)
    out = np.where(ordered, dens, 0.0)
    return float(out) if out.ndim == 0 else out


def sample_ordered(oset: OrderedChannelSet, rng: np.random.Generator, size=None):
    """Draw ordered squared-intensity vectors, shape (size, K) or (K,).

    Ties (measure zero, but possible in floating point) are broken by the
    original draw index, descending ranks keeping ascending indices.
    """
    n = 1 if size is None else int(size)
    intensity = sample_intensity(oset.base, rng, (n, oset.count))
    h = intensity * intensity
    order = np.argsort(-h, axis=1, kind="stable")
    h_sorted = np.take_along_axis(h, order, axis=1)
    return h_sorted[0] if size is None else h_sorted
