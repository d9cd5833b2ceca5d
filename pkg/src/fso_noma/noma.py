"""Power back-off plan, SIC decode order, and per-user achievable rates.

Each user transmits at P_k = a_k * P_aim with a_k = 1/(L_k * 10^((k-1)z/10)),
so the arrived power of decode rank k is backed off by (k-1)*zeta dB while
its path loss cancels exactly. Rates follow the IM/DD multiple-access bound

    R_k = [ 0.5*ln(1 + (mu_k g_k P_k)^2 / (sum_{i>k} (mu_i g_i P_i)^2
            + A*sigma^2)) - eps_phi ]+

with A = 9*(1+eps_mu)^2; dividing through by sigma^2 leaves everything in
terms of rho = P_aim^2/(N0*B) and the per-rank factor
w_k = 10^(-2(k-1)zeta/10). Rates are natural-log (nats per channel use) by
default; a config switch converts targets and reported rates to bits.

The OMA baseline is equal-share TDMA at unchanged arrived power: no
back-off (it needs none without SIC), no interference, a 1/K time share.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .channel import TurbulenceSpec, path_loss

LN2 = math.log(2.0)


@dataclass(frozen=True)
class UserLink:
    """Configuration of one decode rank: distance, rate target, power ratio.

    `target_rate` and `mu` attach to the decode rank, not to a physical
    transmitter; ranks are re-assigned every channel realization.
    """

    distance_km: float
    target_rate: float = 0.0
    mu: float = 0.5

    def __post_init__(self):
        if not self.distance_km > 0.0:
            raise ValueError(f"distance_km={self.distance_km} must be positive")
        if self.target_rate < 0.0:
            raise ValueError(f"target_rate={self.target_rate} must be non-negative")
        if not 0.0 <= self.mu <= 0.5:
            raise ValueError(f"mu={self.mu} outside [0, 0.5]")


@dataclass(frozen=True)
class PowerPlan:
    """Per-rank transmit coefficients a_k inverting path loss plus back-off."""

    p_aim: float
    zeta_db: float
    path_losses: tuple[float, ...]
    coefficients: tuple[float, ...]

    def __post_init__(self):
        if not self.p_aim > 0.0:
            raise ValueError(f"p_aim={self.p_aim} must be positive")
        if self.zeta_db < 0.0:
            raise ValueError(f"zeta_db={self.zeta_db} must be non-negative")

    @property
    def transmit_powers(self) -> tuple[float, ...]:
        return tuple(a * self.p_aim for a in self.coefficients)

    @property
    def arrived_factors(self) -> tuple[float, ...]:
        """L_k * a_k = 10^(-(k-1)zeta/10), independent of the distances."""
        return tuple(10.0 ** (-k * self.zeta_db / 10.0)
                     for k in range(len(self.coefficients)))


def make_power_plan(links, attenuation_per_km: float, p_aim: float,
                    zeta_db: float) -> PowerPlan:
    """Build the back-off plan for links listed in decode-rank order."""
    if zeta_db < 0.0:
        raise ValueError(f"zeta_db={zeta_db} must be non-negative")
    losses = tuple(path_loss(attenuation_per_km, u.distance_km) for u in links)
    coeffs = tuple(1.0 / (loss * 10.0 ** (k * zeta_db / 10.0))
                   for k, loss in enumerate(losses))
    return PowerPlan(p_aim=p_aim, zeta_db=zeta_db, path_losses=losses,
                     coefficients=coeffs)


@dataclass(frozen=True)
class SystemConfig:
    """Everything the analytical and Monte Carlo paths need for one system.

    rho is the SNR-like parameter P_aim^2/(N0*B); when noise_psd and
    bandwidth are supplied they must reproduce it. eps_phi/eps_mu are the
    rate-bound constants (A = 9*(1+eps_mu)^2 is derived). rate_unit picks
    the logarithm base: "nat" (default, natural log) or "bit". turbulence
    is required by anything that touches the channel distribution (outage
    analysis, Monte Carlo); pure rate evaluation on explicit draws works
    without it.
    """

    users: tuple[UserLink, ...]
    plan: PowerPlan
    rho: float
    turbulence: "TurbulenceSpec | None" = None
    noise_psd: float | None = None
    bandwidth: float | None = None
    eps_phi: float = 0.016
    eps_mu: float = 0.0015
    rate_unit: str = "nat"

    def __post_init__(self):
        if len(self.users) == 0:
            raise ValueError("at least one user is required")
        if len(self.users) != len(self.plan.coefficients):
            raise ValueError("power plan and user list sizes differ")
        if not self.rho > 0.0:
            raise ValueError(f"rho={self.rho} must be positive")
        if self.rate_unit not in ("nat", "bit"):
            raise ValueError(f"rate_unit must be 'nat' or 'bit', got {self.rate_unit!r}")
        if (self.noise_psd is None) != (self.bandwidth is None):
            raise ValueError("noise_psd and bandwidth must be given together")
        if self.noise_psd is not None:
            implied = self.plan.p_aim ** 2 / (self.noise_psd * self.bandwidth)
            if not math.isclose(implied, self.rho, rel_tol=1e-9):
                raise ValueError(
                    f"rho={self.rho} inconsistent with p_aim^2/(N0*B)={implied}")

    @property
    def n_users(self) -> int:
        return len(self.users)

    @property
    def a_const(self) -> float:
        return 9.0 * (1.0 + self.eps_mu) ** 2

    def target_rates_nat(self) -> np.ndarray:
        scale = LN2 if self.rate_unit == "bit" else 1.0
        return np.array([u.target_rate * scale for u in self.users])

    def rate_scale_out(self) -> float:
        """Multiplier converting internal nat rates to the configured unit."""
        return 1.0 / LN2 if self.rate_unit == "bit" else 1.0

    def snr_coefficients(self) -> np.ndarray:
        """Per-rank factor rho * mu_k^2 * 10^(-2(k-1)zeta/10).

        The rank-k received SNR contribution is this factor times h_k; the
        physical identity of the user holding the rank drops out because
        L_k a_k depends only on the rank.
        """
        mus = np.array([u.mu for u in self.users])
        w = np.array([10.0 ** (-2.0 * k * self.plan.zeta_db / 10.0)
                      for k in range(self.n_users)])
        return self.rho * mus ** 2 * w

    def oma_snr_coefficients(self) -> np.ndarray:
        """OMA keeps full arrived power on every rank (no back-off)."""
        mus = np.array([u.mu for u in self.users])
        return self.rho * mus ** 2


def decode_order(intensities) -> np.ndarray:
    """Permutation placing users in SIC decode order (descending intensity).

    Returns `order` with order[r] = physical index decoded at rank r+1;
    ties break toward the lower physical index.
    """
    arr = np.asarray(intensities, dtype=np.float64)
    if np.any(~(arr > 0.0)):
        raise ValueError("intensities must be strictly positive")
    return np.argsort(-arr, kind="stable")


@dataclass(frozen=True)
class ChannelDraw:
    """One realization of every user's channel, plus its decode permutation."""

    intensities: tuple[float, ...]
    path_losses: tuple[float, ...]
    order: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if len(self.intensities) != len(self.path_losses):
            raise ValueError("intensities and path_losses sizes differ")
        if any(i <= 0.0 for i in self.intensities):
            raise ValueError("intensities must be strictly positive")
        if not self.order:
            object.__setattr__(
                self, "order", tuple(int(i) for i in decode_order(self.intensities)))
        else:
            if sorted(self.order) != list(range(len(self.intensities))):
                raise ValueError("order is not a permutation of the users")
            ranked = np.asarray(self.intensities)[list(self.order)]
            if np.any(np.diff(ranked) > 0.0):
                raise ValueError("order does not sort intensities descending")

    @property
    def gains(self) -> tuple[float, ...]:
        """g = L*I per physical user."""
        return tuple(l * i for l, i in zip(self.path_losses, self.intensities))

    @property
    def h_by_rank(self) -> np.ndarray:
        """Squared intensities in decode order (non-increasing)."""
        i = np.asarray(self.intensities)[list(self.order)]
        return i * i

    @property
    def decode_rank_of_user(self) -> tuple[int, ...]:
        """Inverse permutation: decode rank (0-based) of each physical user."""
        inv = [0] * len(self.order)
        for rank, phys in enumerate(self.order):
            inv[phys] = rank
        return tuple(inv)


@dataclass(frozen=True)
class RateResult:
    per_user: tuple[float, ...]

    @property
    def sum_rate(self) -> float:
        return float(sum(self.per_user))


def sic_rate_matrix(cfg: SystemConfig, h_ranked: np.ndarray) -> np.ndarray:
    """Clamped per-rank NOMA rates for a batch of ordered draws (n, K)."""
    rates = _kernels.sic_rate_matrix(
        np.atleast_2d(np.asarray(h_ranked, dtype=np.float64)),
        cfg.snr_coefficients(), cfg.a_const, cfg.eps_phi)
    return rates * cfg.rate_scale_out()


def telescoped_sum_rate(cfg: SystemConfig, h_ranked: np.ndarray) -> np.ndarray:
    """Unclamped sum rate per draw; equals the sum of unclamped SIC rates."""
    vals = _kernels.telescoped_sum_rate(
        np.atleast_2d(np.asarray(h_ranked, dtype=np.float64)),
        cfg.snr_coefficients(), cfg.a_const, cfg.n_users * cfg.eps_phi)
    return vals * cfg.rate_scale_out()


def oma_rate_matrix(cfg: SystemConfig, h_ranked: np.ndarray) -> np.ndarray:
    """TDMA baseline: time share 1/K, no interference, no back-off."""
    h = np.atleast_2d(np.asarray(h_ranked, dtype=np.float64))
    coef = cfg.oma_snr_coefficients()
    rates = np.maximum(0.5 * np.log1p(coef * h / cfg.a_const) - cfg.eps_phi, 0.0)
    return rates / cfg.n_users * cfg.rate_scale_out()


def sic_rates(cfg: SystemConfig, draw: ChannelDraw) -> RateResult:
    """Per-rank NOMA rates for a single channel draw."""
    rates = sic_rate_matrix(cfg, draw.h_by_rank[None, :])[0]
    return RateResult(per_user=tuple(float(r) for r in rates))


def oma_rates(cfg: SystemConfig, draw: ChannelDraw) -> RateResult:
    """Per-rank OMA baseline rates for a single channel draw."""
    rates = oma_rate_matrix(cfg, draw.h_by_rank[None, :])[0]
    return RateResult(per_user=tuple(float(r) for r in rates))
