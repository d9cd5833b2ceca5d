#!/usr/bin/env python3
"""Regenerate the arbitrary-precision reference tables in src/fso_noma/data/.

Requires mpmath (dev dependency only; the package itself never imports it).
Every value is computed at 50 decimal digits and cross-checked through at
least two independent routes before it is written:

* squared-intensity CDF: Meijer-G closed form (two equivalent G-function
  representations) against direct adaptive quadrature of the density,
* intensity PDF: direct besselk evaluation (single route, elementary),
* log K_nu: mpmath.besselk on the log scale.

Disagreement beyond 1e-30 aborts the run, so a successful regeneration is
itself evidence that the frozen numbers are right.
"""

from __future__ import annotations

import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 50

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "fso_noma" / "data"

# Rytov variances used throughout the test suite; shapes derived below must
# match channel.rytov_to_shape (exponent 12/5 on the variance).
RYTOV_SETTINGS = ["0.1", "1"]

CDF_POINTS = {
    "0.1": ["0.2", "0.35", "0.5", "0.7", "0.85", "1.0", "1.2", "1.5", "2.0", "3.0"],
    "1": ["0.02", "0.05", "0.1", "0.2", "0.4", "0.7", "1.0", "1.5", "2.5", "5.0"],
}

PDF_POINTS = ["0.05", "0.3", "1.0", "2.5"]

# the two non-trivial orders are alpha-beta for the rytov settings above
KV_ORDERS = ["0", "0.25", "0.5", "0.8605206036344697", "1.830227045888452", "2.25"]
KV_ARGS = ["0.001", "0.01", "0.05", "0.2", "1", "3", "8", "20", "50", "120",
           "300", "700", "1500"]


def shapes_from_rytov(rv: mp.mpf) -> tuple[mp.mpf, mp.mpf]:
    ex = mp.mpf(12) / 5
    a = 1 / (mp.e ** (mp.mpf("0.49") * rv / (1 + mp.mpf("1.11") * rv ** ex) ** (mp.mpf(7) / 6)) - 1)
    b = 1 / (mp.e ** (mp.mpf("0.51") * rv / (1 + mp.mpf("0.69") * rv ** ex) ** (mp.mpf(5) / 6)) - 1)
    return a, b


def intensity_pdf(a: mp.mpf, b: mp.mpf, x: mp.mpf) -> mp.mpf:
    return (2 * (a * b) ** ((a + b) / 2) / (mp.gamma(a) * mp.gamma(b))
            * x ** ((a + b) / 2 - 1) * mp.besselk(a - b, 2 * mp.sqrt(a * b * x)))


def h_cdf_quadrature(a: mp.mpf, b: mp.mpf, y: mp.mpf) -> mp.mpf:
    # F_h(y) = F_I(sqrt(y)) via the change of variables h = I^2
    return mp.quad(lambda x: intensity_pdf(a, b, x), [0, mp.sqrt(y)])


def h_cdf_meijerg_linear(a: mp.mpf, b: mp.mpf, y: mp.mpf) -> mp.mpf:
    w = a * b * mp.sqrt(y)
    pref = w ** ((a + b) / 2) / (mp.gamma(a) * mp.gamma(b))
    g = mp.meijerg([[1 - (a + b) / 2], []],
                   [[(a - b) / 2, (b - a) / 2], [-(a + b) / 2]], w)
    return pref * g


def h_cdf_meijerg_quadratic(a: mp.mpf, b: mp.mpf, y: mp.mpf) -> mp.mpf:
    pref = (a * b) ** ((a + b) / 2) * y ** ((a + b) / 4) / (4 * mp.pi * mp.gamma(a) * mp.gamma(b))
    g = mp.meijerg([[1 - (a + b) / 4], []],
                   [[(a - b) / 4, (a - b + 2) / 4, (b - a) / 4, (b - a + 2) / 4],
                    [-(a + b) / 4]],
                   (a * b) ** 2 * y / 16)
    return pref * g


def check(label: str, x: mp.mpf, y: mp.mpf, tol: str = "1e-30") -> None:
    if abs(x - y) > mp.mpf(tol):
        raise RuntimeError(f"{label}: cross-check failed, |delta| = {mp.nstr(abs(x - y), 5)}")


def build_cdf_table() -> dict:
    settings = []
    for rv_str in RYTOV_SETTINGS:
        rv = mp.mpf(rv_str)
        a, b = shapes_from_rytov(rv)
        points = []
        for y_str in CDF_POINTS[rv_str]:
            y = mp.mpf(y_str)
            f_g = h_cdf_meijerg_linear(a, b, y)
            check(f"cdf rv={rv_str} y={y_str} (quadratic G form)",
                  f_g, h_cdf_meijerg_quadratic(a, b, y))
            check(f"cdf rv={rv_str} y={y_str} (direct quadrature)",
                  f_g, h_cdf_quadrature(a, b, y), tol="1e-25")
            points.append({"y": float(y), "cdf": float(f_g)})
        settings.append({
            "rytov_variance": float(rv),
            "alpha": float(a),
            "beta": float(b),
            "points": points,
        })
    return {"generator": "tools/make_reference_tables.py", "dps": mp.mp.dps,
            "settings": settings}


def build_pdf_table() -> dict:
    settings = []
    for rv_str in RYTOV_SETTINGS:
        rv = mp.mpf(rv_str)
        a, b = shapes_from_rytov(rv)
        points = [{"x": float(mp.mpf(x)), "pdf": float(intensity_pdf(a, b, mp.mpf(x)))}
                  for x in PDF_POINTS]
        settings.append({
            "rytov_variance": float(rv),
            "alpha": float(a),
            "beta": float(b),
            "points": points,
        })
    return {"generator": "tools/make_reference_tables.py", "dps": mp.mp.dps,
            "settings": settings}


def build_kv_table() -> dict:
    entries = []
    for nu_str in KV_ORDERS:
        nu = mp.mpf(nu_str)
        for x_str in KV_ARGS:
            x = mp.mpf(x_str)
            entries.append({"nu": float(nu), "x": float(x),
                            "log_kv": float(mp.log(mp.besselk(nu, x)))})
    return {"generator": "tools/make_reference_tables.py", "dps": mp.mp.dps,
            "entries": entries}


def main() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    tables = {
        "gg_cdf_reference.json": build_cdf_table(),
        "gg_pdf_reference.json": build_pdf_table(),
        "kv_reference.json": build_kv_table(),
    }
    for name, table in tables.items():
        path = DATA_DIR / name
        path.write_text(json.dumps(table, indent=1) + "\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
