#!/usr/bin/env python3
"""Benchmark the compiled kernel extension against the numpy/scipy fallback.

Raw kernels are timed by importing both backend modules directly; the
composite workloads (CDF evaluation, an outage theory point, a Monte Carlo
batch) go through the package, so `--compare` re-runs the script in a
subprocess with FSO_NOMA_PURE=1 to produce the fallback column.

    python benchmarks/bench_kernels.py --compare
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def timeit(fn, min_time=0.2, max_loops=10_000):
    fn()  # warm-up
    loops = 0
    start = time.perf_counter()
    while True:
        fn()
        loops += 1
        elapsed = time.perf_counter() - start
        if elapsed >= min_time or loops >= max_loops:
            return elapsed / loops


def bench_raw_kernels(results: dict) -> None:
    from fso_noma._kernels import _ref
    impls = {"python": _ref}
    try:
        from fso_noma._kernels import _core
        impls["compiled"] = _core
    except ImportError:
        pass
    alpha, beta = 4.393859025392147, 2.563631979503695
    for size in (64, 4096, 262_144):
        x = np.geomspace(1e-4, 50.0, size)
        for name, impl in impls.items():
            dt = timeit(lambda: impl.h_pdf(alpha, beta, x))
            results[f"h_pdf[{size}] ({name})"] = dt


def bench_composites(results: dict) -> None:
    from fso_noma import analysis, channel, mc, noma
    from fso_noma._kernels import backend_name

    tag = backend_name()
    turb = channel.TurbulenceSpec.from_rytov(1.0)
    dist = turb.dist

    ys = np.geomspace(0.01, 10.0, 200)
    results[f"h_cdf[200] ({tag})"] = timeit(lambda: channel.h_cdf(dist, ys))

    users = (noma.UserLink(1.0, 0.5), noma.UserLink(3.0, 0.5))
    plan = noma.make_power_plan(users, 0.06354729422, 1.0, 5.0)
    cfg = noma.SystemConfig(users=users, plan=plan, rho=1e3, turbulence=turb)
    results[f"outage_theory_point ({tag})"] = timeit(
        lambda: analysis.outage_per_user(cfg), min_time=0.5)

    policy = mc.RngPolicy(1234)
    results[f"mc_outage_100k ({tag})"] = timeit(
        lambda: mc.simulate_outage(cfg, 100_000, policy), min_time=0.5)
    results[f"mc_sumrate_1M ({tag})"] = timeit(
        lambda: mc.simulate_sum_rate(cfg, "noma", 1_000_000, policy), min_time=0.5)


def run(emit_json: bool) -> dict:
    results: dict[str, float] = {}
    bench_raw_kernels(results)
    bench_composites(results)
    if emit_json:
        print(json.dumps(results))
    else:
        width = max(len(k) for k in results)
        for key, dt in results.items():
            print(f"{key:<{width}}  {dt * 1e3:10.3f} ms")
    return results


def compare() -> None:
    here = os.path.abspath(__file__)
    rows: dict[str, dict[str, float]] = {}
    for label, env_extra in (("compiled", {}), ("python", {"FSO_NOMA_PURE": "1"})):
        env = dict(os.environ, **env_extra)
        out = subprocess.run([sys.executable, here, "--json"], env=env,
                             capture_output=True, text=True, check=True)
        data = json.loads(out.stdout.strip().splitlines()[-1])
        for key, dt in data.items():
            base = key.split(" (")[0]
            rows.setdefault(base, {})[key.split("(")[1].rstrip(")")] = dt

    width = max(len(k) for k in rows)
    print(f"{'benchmark':<{width}}  {'compiled':>12}  {'python':>12}  {'speedup':>8}")
    for base, cols in rows.items():
        c = cols.get("compiled")
        p = cols.get("python")
        if c is None or p is None:
            only = c if c is not None else p
            print(f"{base:<{width}}  {'-' if c is None else f'{c*1e3:10.3f}ms'}"
                  f"  {'-' if p is None else f'{p*1e3:10.3f}ms'}")
            continue
        print(f"{base:<{width}}  {c * 1e3:10.3f}ms  {p * 1e3:10.3f}ms  {p / c:7.2f}x")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--json", action="store_true",
                        help="emit machine-readable timings")
    parser.add_argument("--compare", action="store_true",
                        help="run both backends in subprocesses and tabulate")
    args = parser.parse_args()
    if args.compare:
        compare()
    else:
        run(args.json)


if __name__ == "__main__":
    main()
