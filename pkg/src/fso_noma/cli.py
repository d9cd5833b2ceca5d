"""Command-line front end: outage/sum-rate sweeps to CSV plus validation.

    fso-noma outage  <config.json>     theory + Monte Carlo outage sweep
    fso-noma sumrate <config.json>     ergodic sum-rate sweep (NOMA/OMA)
    fso-noma validate [--quick]        built-in numerical cross-checks

Global flags --seed/--trials/--out override the config's MC settings and
output path; --threads picks the worker count for the chunked Monte Carlo
engine and never changes the numbers.

Exit codes: 0 success, 1 validation-suite failure, 2 config error,
3 numeric (quadrature) failure. CSV files are UTF-8, comma-separated with
a header row and "\n" line endings; floats carry 9 significant digits.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .analysis import ergodic_sum_rate_noma, ergodic_sum_rate_oma, outage_per_user
from .config import ConfigError, ExperimentConfig, MCSettings, load_experiment_config
from .mc import RngPolicy, simulate_outage, simulate_sum_rate
from .quadrature import QuadratureError
from .validate import run_checks

OUTAGE_COLUMNS = ("rho_dB", "user_rank", "zeta_dB", "rytov_var", "target_rate",
                  "outage_theory", "outage_mc", "mc_stderr", "n_trials")
SUMRATE_COLUMNS = ("rho_dB", "scheme", "rytov_var", "zeta_dB", "sum_rate",
                   "stderr", "method")


def _fmt(value) -> str:
    if value is None or value == "":
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".9g")


def _write_csv(path: str, columns: tuple[str, ...], rows: list[tuple]) -> None:
    out = Path(path)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(columns)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    out.write_bytes(("\n".join(lines) + "\n").encode("utf-8"))


def _apply_overrides(exp: ExperimentConfig, args) -> ExperimentConfig:
    mc = exp.mc
    seed = getattr(args, "seed", None)
    trials = getattr(args, "trials", None)
    out = getattr(args, "out", None)
    if seed is not None or trials is not None:
        mc = MCSettings(n_trials=trials if trials is not None else mc.n_trials,
                        seed=seed if seed is not None else mc.seed,
                        chunk_size=mc.chunk_size)
    changes = {"mc": mc}
    if out is not None:
        changes["output"] = out
    from dataclasses import replace
    return replace(exp, **changes)


def _require_output(exp: ExperimentConfig, path: str) -> str:
    if exp.output is None:
        raise ConfigError([f"{path}: no 'output' path in config and no --out given"])
    return exp.output


def cmd_outage(config_path: str, args) -> int:
    """One CSV row per (rytov, zeta, rho, user): theory and MC outage."""
    exp = _apply_overrides(load_experiment_config(config_path), args)
    out_path = _require_output(exp, config_path)
    threads = getattr(args, "threads", None) or 1
    policy = RngPolicy(master_seed=exp.mc.seed, chunk_size=exp.mc.chunk_size)
    rows = []
    for rv in exp.rytov_variances:
        for rates in exp.rate_sets():
            for zeta in exp.zeta_db:
                for rho_db in exp.rho_db:
                    cfg = exp.system_config(rv, zeta, rho_db, rates)
                    theory = outage_per_user(cfg)
                    sim = simulate_outage(cfg, exp.mc.n_trials, policy, threads)
                    for rank in range(1, cfg.n_users + 1):
                        est = sim.per_user[rank - 1]
                        rows.append((rho_db, rank, zeta, rv, rates[rank - 1],
                                     theory.per_user_outage[rank - 1],
                                     est.mean, est.std_error, exp.mc.n_trials))
    _write_csv(out_path, OUTAGE_COLUMNS, rows)
    print(f"wrote {len(rows)} rows to {out_path}")
    return 0


def cmd_sumrate(config_path: str, args) -> int:
    """Two CSV rows per (rytov, zeta, rho, scheme): theory and MC."""
    exp = _apply_overrides(load_experiment_config(config_path), args)
    out_path = _require_output(exp, config_path)
    threads = getattr(args, "threads", None) or 1
    policy = RngPolicy(master_seed=exp.mc.seed, chunk_size=exp.mc.chunk_size)
    theory_fn = {"noma": ergodic_sum_rate_noma, "oma": ergodic_sum_rate_oma}
    rows = []
    for rv in exp.rytov_variances:
        for zeta in exp.zeta_db:
            for rho_db in exp.rho_db:
                cfg = exp.system_config(rv, zeta, rho_db)
                for scheme in exp.schemes:
                    theory = theory_fn[scheme](cfg, method="auto",
                                               n_trials=exp.mc.n_trials)
                    rows.append((rho_db, scheme, rv, zeta, theory.telescoped,
                                 theory.std_error, theory.method))
                    sim = simulate_sum_rate(cfg, scheme, exp.mc.n_trials,
                                            policy, threads)
                    rows.append((rho_db, scheme, rv, zeta, sim.mean,
                                 sim.std_error, "mc"))
    _write_csv(out_path, SUMRATE_COLUMNS, rows)
    print(f"wrote {len(rows)} rows to {out_path}")
    return 0


def cmd_validate(quick: bool) -> int:
    results = run_checks(quick=quick)
    for res in results:
        print(f"{'PASS' if res.passed else 'FAIL'} {res.name}: {res.detail}")
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"{len(failed)} of {len(results)} checks failed")
        return 1
    print(f"all {len(results)} checks passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps subparser defaults from clobbering values parsed at the
    # root, so the flags work both before and after the subcommand
    shared = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    shared.add_argument("--seed", type=int,
                        help="override the Monte Carlo master seed")
    shared.add_argument("--trials", type=int,
                        help="override the Monte Carlo trial count")
    shared.add_argument("--out", type=str,
                        help="override the output CSV path")
    shared.add_argument("--threads", type=int,
                        help="Monte Carlo worker threads (does not change results)")

    parser = argparse.ArgumentParser(
        prog="fso-noma", parents=[shared],
        description="Uplink NOMA over gamma-gamma FSO turbulence: outage and "
                    "ergodic-rate sweeps with Monte Carlo cross-validation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("outage", parents=[shared],
                       help="outage-probability sweep to CSV")
    p.add_argument("config", help="scenario JSON file")

    p = sub.add_parser("sumrate", parents=[shared],
                       help="ergodic sum-rate sweep to CSV")
    p.add_argument("config", help="scenario JSON file")

    p = sub.add_parser("validate", parents=[shared],
                       help="run the numerical validation suite")
    p.add_argument("--quick", action="store_true",
                   help="reduced sample sizes, finishes in seconds")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "outage":
            return cmd_outage(args.config, args)
        if args.command == "sumrate":
            return cmd_sumrate(args.config, args)
        return cmd_validate(quick=args.quick)
    except ConfigError as exc:
        for line in exc.diagnostics:
            print(line, file=sys.stderr)
        return 2
    except QuadratureError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
