"""Built-in validation suite behind the `fso-noma validate` command.

Re-runs the load-bearing numerical cross-checks against the shipped
arbitrary-precision reference tables and sampling oracles:

* density normalization for both supported turbulence settings,
* quadrature CDF against the closed-form reference table,
* sampler mean/variance against the product-of-gammas moments,
* Kolmogorov-Smirnov fit of ordered-statistic samples to their marginals,
* the telescoping identity between per-rank rates and the closed sum form.

`quick=True` trims the sampling sizes so the whole suite finishes in a few
seconds; the full run uses the same sizes as the acceptance tests.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import _kernels
from .channel import (GammaGammaDist, h_cdf, h_pdf, intensity_cdf,
                      intensity_pdf, sample_intensity)
from .order_stats import OrderedChannelSet, ordered_marginal_cdf, sample_ordered
from .quadrature import integrate_to_inf


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _data_path(name: str):
    override = os.environ.get("FSO_NOMA_DATA_DIR")
    if override:
        return Path(override) / name
    return resources.files("fso_noma").joinpath("data", name)


def load_reference_table(name: str) -> dict:
    """Load one of the shipped reference tables (env FSO_NOMA_DATA_DIR
    points the loader somewhere else, which the negative tests use)."""
    return json.loads(_data_path(name).read_text())


def _reference_dists() -> list[tuple[float, GammaGammaDist]]:
    table = load_reference_table("gg_cdf_reference.json")
    return [(s["rytov_variance"], GammaGammaDist(s["alpha"], s["beta"]))
            for s in table["settings"]]


def check_pdf_normalization(quick: bool = False) -> CheckResult:
    worst = 0.0
    for _, dist in _reference_dists():
        n_i = integrate_to_inf(lambda x: intensity_pdf(dist, np.maximum(x, 1e-300))).value
        n_h = integrate_to_inf(lambda x: h_pdf(dist, np.maximum(x, 1e-300))).value
        worst = max(worst, abs(n_i - 1.0), abs(n_h - 1.0))
    return CheckResult("pdf-normalization", worst <= 1e-6,
                       f"max |integral - 1| = {worst:.3e} (tolerance 1e-6)")


def check_cdf_reference(quick: bool = False) -> CheckResult:
    name = "gg_cdf_reference.json"
    table = load_reference_table(name)
    worst = 0.0
    for setting in table["settings"]:
        dist = GammaGammaDist(setting["alpha"], setting["beta"])
        ys = np.array([p["y"] for p in setting["points"]])
        expected = np.array([p["cdf"] for p in setting["points"]])
        got = np.atleast_1d(h_cdf(dist, ys))
        worst = max(worst, float(np.max(np.abs(got - expected))))
    return CheckResult("cdf-reference-table", worst <= 1e-6,
                       f"max |cdf - {name}| = {worst:.3e} (tolerance 1e-6)")


def check_sampler_moments(quick: bool = False) -> CheckResult:
    n = 100_000 if quick else 1_000_000
    rng = np.random.default_rng(0xA5A5A5)
    msgs = []
    ok = True
    for rv, dist in _reference_dists():
        s = sample_intensity(dist, rng, n)
        mean = s.mean()
        se_mean = s.std(ddof=1) / math.sqrt(n)
        var = s.var(ddof=1)
        m4 = np.mean((s - mean) ** 4)
        se_var = math.sqrt(max(m4 - var ** 2, 0.0) / n)
        ok_mean = abs(mean - 1.0) <= 3 * se_mean
        ok_var = abs(var - dist.scintillation_index) <= 3 * se_var
        ok = ok and ok_mean and ok_var
        msgs.append(f"rv={rv}: |mean-1|={abs(mean - 1):.2e} (3se={3 * se_mean:.2e}), "
                    f"|var-SI|={abs(var - dist.scintillation_index):.2e} "
                    f"(3se={3 * se_var:.2e})")
    return CheckResult("sampler-moments", ok, "; ".join(msgs))


def check_order_statistics_ks(quick: bool = False) -> CheckResult:
    from scipy.stats import ks_1samp
    n = 20_000 if quick else 100_000
    ok = True
    msgs = []
    for rv, dist in _reference_dists():
        oset = OrderedChannelSet(2, dist)
        draws = sample_ordered(oset, np.random.default_rng(0xC0FFEE), n)
        for rank in (1, 2):
            res = ks_1samp(draws[:, rank - 1],
                           lambda v: ordered_marginal_cdf(oset, rank, v))
            ok = ok and res.pvalue > 0.01
            msgs.append(f"rv={rv} rank{rank}: p={res.pvalue:.3f}")
    return CheckResult("order-statistics-ks", ok,
                       "; ".join(msgs) + " (significance 0.01)")


def check_telescoping_identity(quick: bool = False) -> CheckResult:
    rng = np.random.default_rng(0xBEEF)
    n = 10_000
    coef = np.array([250.0, 25.0])
    a_const = 9.0 * 1.0015 ** 2
    eps = 0.016
    h = np.sort(rng.gamma(2.0, 1.0, (n, 2)), axis=1)[:, ::-1]
    s = h * coef
    per_rank = (0.5 * np.log1p(s[:, 0] / (s[:, 1] + a_const))
                + 0.5 * np.log1p(s[:, 1] / a_const) - 2 * eps)
    tele = _kernels.telescoped_sum_rate(h, coef, a_const, 2 * eps)
    rel = float(np.max(np.abs(tele - per_rank) / np.maximum(np.abs(per_rank), 1e-30)))
    return CheckResult("telescoping-identity", rel <= 1e-12,
                       f"max relative gap {rel:.3e} over {n} draws (tolerance 1e-12)")


ALL_CHECKS = [
    check_pdf_normalization,
    check_cdf_reference,
    check_sampler_moments,
    check_order_statistics_ks,
    check_telescoping_identity,
]


def run_checks(quick: bool = False) -> list[CheckResult]:
    results = []
    for fn in ALL_CHECKS:
        try:
            results.append(fn(quick))
        except Exception as exc:  # a crashed check is a failed check
            results.append(CheckResult(fn.__name__.removeprefix("check_").replace("_", "-"),
                                       False, f"raised {type(exc).__name__}: {exc}"))
    return results
