"""Reproducible chunked Monte Carlo estimation of outage and sum rate.

Trials are grouped into fixed-size chunks; chunk c draws from a generator
seeded by SeedSequence(master_seed, spawn_key=(c,)), so every chunk's
stream depends only on (master_seed, chunk index). Per-chunk accumulators
are reduced in ascending chunk order, which makes results bit-identical
for a given (config, n_trials, master_seed, chunk_size) no matter how many
worker threads execute the chunks.

Unlike the analytical path, the outage simulation evaluates the exact
clamped rate event R_k < target; a decode failure at any earlier rank also
marks rank k as failed, matching the event-intersection definition of
per-user outage.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels
from .channel import sample_intensity
from .noma import SystemConfig

_MIN_TRIALS = 1_000


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    std_error: float
    n_trials: int

    @property
    def ci95_halfwidth(self) -> float:
        return 1.96 * self.std_error


@dataclass(frozen=True)
class RngPolicy:
    """Chunked stream derivation: (master_seed, chunk index) -> generator."""

    master_seed: int
    chunk_size: int = 1 << 16

    def __post_init__(self):
        if self.chunk_size < 1:
            raise ValueError(f"chunk_size={self.chunk_size} must be positive")

    def chunk_rng(self, chunk_index: int) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master_seed, spawn_key=(chunk_index,))
        return np.random.default_rng(ss)

    def chunk_counts(self, n_trials: int) -> list[int]:
        full, rem = divmod(n_trials, self.chunk_size)
        return [self.chunk_size] * full + ([rem] if rem else [])


def run_chunked(job: Callable[[np.random.Generator, int], tuple],
                n_trials: int, policy: RngPolicy, threads: int = 1) -> tuple:
    """Run `job(rng, count)` over all chunks and sum the accumulator tuples.

    The reduction is a left fold in ascending chunk order regardless of
    `threads`, so the result is independent of scheduling.
    """
    counts = policy.chunk_counts(n_trials)
    if threads > 1 and len(counts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(
                lambda c: job(policy.chunk_rng(c[0]), c[1]), enumerate(counts)))
    else:
        results = [job(policy.chunk_rng(i), c) for i, c in enumerate(counts)]
    acc = list(results[0])
    for res in results[1:]:
        for j, part in enumerate(res):
            acc[j] = acc[j] + part
    return tuple(acc)


def _require_trials(n_trials: int) -> None:
    if n_trials < _MIN_TRIALS:
        raise ValueError(f"n_trials={n_trials} below the minimum of {_MIN_TRIALS}")


def _require_turbulence(cfg: SystemConfig):
    if cfg.turbulence is None:
        raise ValueError("SystemConfig.turbulence must be set for simulation")
    return cfg.turbulence.dist


def _draw_ranked_h(dist, rng: np.random.Generator, count: int, k: int) -> np.ndarray:
    intensity = sample_intensity(dist, rng, (count, k))
    h = intensity * intensity
    order = np.argsort(-h, axis=1, kind="stable")
    return np.take_along_axis(h, order, axis=1)


def _proportion_estimate(successes: int, n: int) -> MCEstimate:
    p = successes / n
    se = math.sqrt(max(p * (1.0 - p), 0.0) / (n - 1))
    return MCEstimate(mean=p, std_error=se, n_trials=n)


def _moment_estimate(total: float, total_sq: float, n: int) -> MCEstimate:
    mean = total / n
    var = max((total_sq - n * mean * mean) / (n - 1), 0.0)
    return MCEstimate(mean=mean, std_error=math.sqrt(var / n), n_trials=n)


@dataclass(frozen=True)
class OutageSimResult:
    per_user: tuple[MCEstimate, ...]
    coverage: MCEstimate


def simulate_outage(cfg: SystemConfig, n_trials: int, policy: RngPolicy,
                    threads: int = 1) -> OutageSimResult:
    """Physical per-user outage and coverage estimates.

    Per trial: draw K i.i.d. intensities, rank them, evaluate the exact
    clamped rates, and flag rank k as failed when its rate misses the
    target or any earlier rank already failed.
    """
    _require_trials(n_trials)
    dist = _require_turbulence(cfg)
    targets = cfg.target_rates_nat()
    coef = cfg.snr_coefficients()
    k = cfg.n_users

    def job(rng: np.random.Generator, count: int) -> tuple:
        h = _draw_ranked_h(dist, rng, count, k)
        rates = _kernels.sic_rate_matrix(h, coef, cfg.a_const, cfg.eps_phi)
        failed = np.maximum.accumulate(rates < targets[None, :], axis=1)
        return (failed.sum(axis=0, dtype=np.int64),
                np.int64(count) - failed[:, -1].sum(dtype=np.int64))

    fail_counts, cover_count = run_chunked(job, n_trials, policy, threads)
    per_user = tuple(_proportion_estimate(int(c), n_trials) for c in fail_counts)
    coverage = _proportion_estimate(int(cover_count), n_trials)
    return OutageSimResult(per_user=per_user, coverage=coverage)


def _sum_rate_job(cfg: SystemConfig, scheme: str):
    dist = _require_turbulence(cfg)
    k = cfg.n_users
    scale = cfg.rate_scale_out()

    if scheme == "noma":
        coef = cfg.snr_coefficients()

        def job(rng: np.random.Generator, count: int) -> tuple:
            h = _draw_ranked_h(dist, rng, count, k)
            tel = _kernels.telescoped_sum_rate(h, coef, cfg.a_const,
                                               k * cfg.eps_phi) * scale
            clamped = _kernels.sic_rate_matrix(h, coef, cfg.a_const,
                                               cfg.eps_phi).sum(axis=1) * scale
            return (tel.sum(), np.square(tel).sum(),
                    clamped.sum(), np.square(clamped).sum())

        return job

    if scheme == "oma":
        coef = cfg.oma_snr_coefficients()

        def job(rng: np.random.Generator, count: int) -> tuple:
            h = _draw_ranked_h(dist, rng, count, k)
            rates = np.maximum(
                0.5 * np.log1p(coef * h / cfg.a_const) - cfg.eps_phi, 0.0)
            total = rates.sum(axis=1) / k * scale
            return (total.sum(), np.square(total).sum(),
                    total.sum(), np.square(total).sum())

        return job

    raise ValueError(f"unknown scheme {scheme!r}; expected 'noma' or 'oma'")


def simulate_sum_rate(cfg: SystemConfig, scheme: str, n_trials: int,
                      policy: RngPolicy, threads: int = 1) -> MCEstimate:
    """Sample-mean sum rate: telescoped form for NOMA, clamped TDMA for OMA."""
    tel, _ = simulate_sum_rate_full(cfg, scheme, n_trials, policy, threads)
    return tel


def simulate_sum_rate_full(cfg: SystemConfig, scheme: str, n_trials: int,
                           policy: RngPolicy, threads: int = 1
                           ) -> tuple[MCEstimate, MCEstimate]:
    """Both ergodic views: (telescoped headline, clamped per-user sum).

    For OMA the two coincide (its rates are clamped by definition).
    """
    _require_trials(n_trials)
    job = _sum_rate_job(cfg, scheme)
    s_tel, sq_tel, s_cl, sq_cl = run_chunked(job, n_trials, policy, threads)
    return (_moment_estimate(float(s_tel), float(sq_tel), n_trials),
            _moment_estimate(float(s_cl), float(sq_cl), n_trials))
