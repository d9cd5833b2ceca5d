"""Uplink power-domain NOMA over gamma-gamma FSO turbulence channels.

Analytical outage/coverage/ergodic-rate evaluation cross-validated by a
reproducible chunked Monte Carlo engine, plus a CSV-emitting experiment
CLI (`fso-noma`).
"""

from ._kernels import backend_name
from .analysis import (ErgodicRate, OutageResult, OutageThresholds,
                       ergodic_sum_rate_noma, ergodic_sum_rate_oma,
                       outage_per_user, outage_thresholds,
                       success_prob_rank_k, success_prob_weakest)
from .channel import (AtmosphericConfig, GammaGammaDist, TurbulenceSpec,
                      attenuation_coefficient, h_cdf, h_pdf, h_sf,
                      intensity_cdf, intensity_pdf, path_loss, rytov_to_shape,
                      sample_intensity)
from .mc import (MCEstimate, OutageSimResult, RngPolicy, run_chunked,
                 simulate_outage, simulate_sum_rate, simulate_sum_rate_full)
from .noma import (ChannelDraw, PowerPlan, RateResult, SystemConfig, UserLink,
                   decode_order, make_power_plan, oma_rates, sic_rates)
from .order_stats import (OrderedChannelSet, ordered_joint_pdf,
                          ordered_marginal_cdf, ordered_marginal_pdf,
                          sample_ordered)
from .quadrature import QuadratureError

__version__ = "0.1.0"

__all__ = [
    "AtmosphericConfig", "ChannelDraw", "ErgodicRate", "GammaGammaDist",
    "MCEstimate", "OrderedChannelSet", "OutageResult", "OutageSimResult",
    "OutageThresholds", "PowerPlan", "QuadratureError", "RateResult",
    "RngPolicy", "SystemConfig", "TurbulenceSpec", "UserLink",
    "attenuation_coefficient", "backend_name", "decode_order",
    "ergodic_sum_rate_noma", "ergodic_sum_rate_oma", "h_cdf", "h_pdf",
    "h_sf", "intensity_cdf", "intensity_pdf", "make_power_plan", "oma_rates",
    "ordered_joint_pdf", "ordered_marginal_cdf", "ordered_marginal_pdf",
    "outage_per_user", "outage_thresholds", "path_loss", "run_chunked",
    "rytov_to_shape", "sample_intensity", "sample_ordered", "sic_rates",
    "simulate_outage", "simulate_sum_rate", "simulate_sum_rate_full",
    "success_prob_rank_k", "success_prob_weakest",
]
