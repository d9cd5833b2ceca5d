"""Experiment configuration: JSON schema, loading, and validation.

A scenario file fully determines one sweep:

    {
      "scenario": "outage_backoff_weak_turbulence",
      "atmosphere": {"visibility_km": 16.0, "wavelength_nm": 1550.0},
      "rytov_variances": [0.1],
      "users": [{"distance_km": 1.0, "target_rate": 0.5, "mu": 0.5},
                {"distance_km": 3.0, "target_rate": 0.5, "mu": 0.5}],
      "zeta_db": [2.0, 3.0, 5.0],
      "rho_db": {"start": 10.0, "stop": 40.0, "step": 2.5},
      "schemes": ["noma", "oma"],
      "p_aim": 1.0,
      "rate_unit": "nat",
      "mc": {"n_trials": 100000, "seed": 20240811, "chunk_size": 65536},
      "output": "out/outage_backoff_weak.csv"
    }

`rho_db` is the SNR-style sweep axis in dB: rho_dB = 10*log10(rho) with
rho = P_aim^2/(N0*B). An explicit grid {"values": [...]} is accepted in
place of start/stop/step; either way the grid must be non-empty and
strictly increasing. `users` are listed in decode-rank order (rank 1
first). An optional "target_rate_sets": [[r1, r2], ...] sweeps outage runs
over several per-rank rate vectors in one file. Unknown keys are rejected
so typos fail loudly.

Diagnostics carry the line of the offending key in the original file
whenever it can be located, in a `file:line: message` format.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .channel import AtmosphericConfig, TurbulenceSpec, attenuation_coefficient
from .noma import SystemConfig, UserLink, make_power_plan

_TOP_KEYS = {"scenario", "atmosphere", "rytov_variances", "users", "zeta_db",
             "rho_db", "schemes", "p_aim", "rate_unit", "mc", "output",
             "target_rate_sets"}


class ConfigError(Exception):
    """Invalid experiment configuration; str() lists all diagnostics."""

    def __init__(self, diagnostics: list[str]):
        super().__init__("\n".join(diagnostics))
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class MCSettings:
    n_trials: int = 100_000
    seed: int = 20240811
    chunk_size: int = 1 << 16


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    atmosphere: AtmosphericConfig
    rytov_variances: tuple[float, ...]
    users: tuple[UserLink, ...]
    zeta_db: tuple[float, ...]
    rho_db: tuple[float, ...]
    schemes: tuple[str, ...] = ("noma", "oma")
    p_aim: float = 1.0
    rate_unit: str = "nat"
    mc: MCSettings = field(default_factory=MCSettings)
    output: str | None = None
    # optional sweep over per-rank target-rate vectors; defaults to the
    # rates carried by `users`, so plain scenarios need not set it
    target_rate_sets: tuple[tuple[float, ...], ...] = ()

    def rate_sets(self) -> tuple[tuple[float, ...], ...]:
        if self.target_rate_sets:
            return self.target_rate_sets
        return (tuple(u.target_rate for u in self.users),)

    def system_config(self, rytov_variance: float, zeta_db: float,
                      rho_db: float, target_rates: tuple[float, ...] | None = None
                      ) -> SystemConfig:
        """Concrete SystemConfig for one grid point of the sweep."""
        users = self.users
        if target_rates is not None:
            users = tuple(UserLink(u.distance_km, r, u.mu)
                          for u, r in zip(users, target_rates))
        phi = attenuation_coefficient(self.atmosphere)
        plan = make_power_plan(users, phi, self.p_aim, zeta_db)
        return SystemConfig(
            users=users, plan=plan, rho=10.0 ** (rho_db / 10.0),
            turbulence=TurbulenceSpec.from_rytov(rytov_variance),
            rate_unit=self.rate_unit)


class _Diag:
    """Collects diagnostics with best-effort line numbers from the source."""

    def __init__(self, path: str, raw: str):
        self.path = path
        self.raw = raw
        self.messages: list[str] = []

    def add(self, key: str, message: str) -> None:
        m = re.search(rf'"{re.escape(key)}"\s*:', self.raw)
        if m:
            line = self.raw.count("\n", 0, m.start()) + 1
            self.messages.append(f"{self.path}:{line}: {message}")
        else:
            self.messages.append(f"{self.path}: {message}")

    def raise_if_any(self) -> None:
        if self.messages:
            raise ConfigError(self.messages)


def _number(diag, obj, key, *, default=None, minimum=None, positive=False,
            parent=None):
    src = obj if parent is None else obj
    if key not in src:
        if default is not None:
            return default
        diag.add(parent or key, f"missing required key {key!r}")
        return None
    val = src[key]
    if not isinstance(val, (int, float)) or isinstance(val, bool) or not math.isfinite(val):
        diag.add(key, f"{key!r} must be a finite number, got {val!r}")
        return None
    if positive and not val > 0:
        diag.add(key, f"{key!r} must be positive, got {val!r}")
        return None
    if minimum is not None and val < minimum:
        diag.add(key, f"{key!r} must be >= {minimum}, got {val!r}")
        return None
    return float(val)


def _rho_grid(diag, spec) -> tuple[float, ...]:
    if isinstance(spec, dict) and "values" in spec:
        values = spec["values"]
    elif isinstance(spec, dict):
        start = _number(diag, spec, "start")
        stop = _number(diag, spec, "stop")
        step = _number(diag, spec, "step", positive=True)
        if None in (start, stop, step):
            return ()
        if stop < start:
            diag.add("rho_db", f"'rho_db' stop {stop} below start {start}")
            return ()
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = [start + i * step for i in range(n)]
    elif isinstance(spec, list):
        values = spec
    else:
        diag.add("rho_db", "'rho_db' must be a list or a start/stop/step object")
        return ()
    if not values:
        diag.add("rho_db", "'rho_db' sweep is empty")
        return ()
    out = tuple(float(v) for v in values)
    if any(b <= a for a, b in zip(out, out[1:])):
        diag.add("rho_db", "'rho_db' sweep must be strictly increasing")
        return ()
    return out


def parse_experiment_config(raw: str, path: str = "<config>") -> ExperimentConfig:
    """Parse and validate a scenario JSON document."""
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{path}:{exc.lineno}: invalid JSON: {exc.msg}"]) from exc
    diag = _Diag(path, raw)
    if not isinstance(doc, dict):
        raise ConfigError([f"{path}:1: top level must be an object"])

    for key in doc:
        if key not in _TOP_KEYS:
            diag.add(key, f"unknown key {key!r}")

    scenario = doc.get("scenario", "unnamed")
    if not isinstance(scenario, str):
        diag.add("scenario", "'scenario' must be a string")
        scenario = "unnamed"

    atmosphere = None
    atm = doc.get("atmosphere")
    if not isinstance(atm, dict):
        diag.add("atmosphere", "missing or invalid 'atmosphere' object")
    else:
        v = _number(diag, atm, "visibility_km", positive=True)
        wl = _number(diag, atm, "wavelength_nm", positive=True)
        if v is not None and wl is not None:
            try:
                atmosphere = AtmosphericConfig(v, wl)
            except ValueError as exc:
                diag.add("visibility_km", str(exc))

    rytov = doc.get("rytov_variances")
    rytov_out: tuple[float, ...] = ()
    if not isinstance(rytov, list) or not rytov:
        diag.add("rytov_variances", "'rytov_variances' must be a non-empty list")
    elif any(not isinstance(v, (int, float)) or v <= 0 for v in rytov):
        diag.add("rytov_variances", "'rytov_variances' entries must be positive numbers")
    else:
        rytov_out = tuple(float(v) for v in rytov)

    users_doc = doc.get("users")
    users: tuple[UserLink, ...] = ()
    if not isinstance(users_doc, list) or not users_doc:
        diag.add("users", "'users' must be a non-empty list")
    else:
        parsed = []
        for i, u in enumerate(users_doc):
            if not isinstance(u, dict):
                diag.add("users", f"user #{i + 1} must be an object")
                continue
            d = _number(diag, u, "distance_km", positive=True)
            r = _number(diag, u, "target_rate", default=0.0, minimum=0.0)
            m = _number(diag, u, "mu", default=0.5)
            if None in (d, r, m):
                continue
            try:
                parsed.append(UserLink(d, r, m))
            except ValueError as exc:
                diag.add("users", f"user #{i + 1}: {exc}")
        users = tuple(parsed)

    zetas = doc.get("zeta_db", [0.0])
    zeta_out: tuple[float, ...] = ()
    if not isinstance(zetas, list) or not zetas:
        diag.add("zeta_db", "'zeta_db' must be a non-empty list")
    elif any(not isinstance(z, (int, float)) or z < 0 for z in zetas):
        diag.add("zeta_db", "'zeta_db' entries must be non-negative numbers")
    else:
        zeta_out = tuple(float(z) for z in zetas)

    rho_out = _rho_grid(diag, doc.get("rho_db"))
    if doc.get("rho_db") is None:
        diag.add("rho_db", "missing required key 'rho_db'")

    schemes_doc = doc.get("schemes", ["noma", "oma"])
    schemes: tuple[str, ...] = ()
    if not isinstance(schemes_doc, list) or not schemes_doc:
        diag.add("schemes", "'schemes' must be a non-empty list")
    else:
        bad = [s for s in schemes_doc if s not in ("noma", "oma")]
        if bad:
            diag.add("schemes", f"unknown schemes {bad!r}; expected 'noma'/'oma'")
        else:
            schemes = tuple(schemes_doc)

    p_aim = _number(diag, doc, "p_aim", default=1.0, positive=True) or 1.0

    rate_unit = doc.get("rate_unit", "nat")
    if rate_unit not in ("nat", "bit"):
        diag.add("rate_unit", f"'rate_unit' must be 'nat' or 'bit', got {rate_unit!r}")
        rate_unit = "nat"

    mc_doc = doc.get("mc", {})
    mc = MCSettings()
    if not isinstance(mc_doc, dict):
        diag.add("mc", "'mc' must be an object")
    else:
        n_trials = _number(diag, mc_doc, "n_trials", default=float(mc.n_trials),
                           minimum=1000)
        seed = _number(diag, mc_doc, "seed", default=float(mc.seed))
        chunk = _number(diag, mc_doc, "chunk_size", default=float(mc.chunk_size),
                        positive=True)
        if None not in (n_trials, seed, chunk):
            mc = MCSettings(n_trials=int(n_trials), seed=int(seed),
                            chunk_size=int(chunk))

    output = doc.get("output")
    if output is not None and not isinstance(output, str):
        diag.add("output", "'output' must be a string path")
        output = None

    rate_sets_doc = doc.get("target_rate_sets", [])
    rate_sets: tuple[tuple[float, ...], ...] = ()
    if not isinstance(rate_sets_doc, list):
        diag.add("target_rate_sets", "'target_rate_sets' must be a list of lists")
    else:
        parsed_sets = []
        for i, entry in enumerate(rate_sets_doc):
            if (not isinstance(entry, list) or len(entry) != len(users)
                    or any(not isinstance(r, (int, float)) or r < 0 for r in entry)):
                diag.add("target_rate_sets",
                         f"set #{i + 1} must list one non-negative rate per user")
            else:
                parsed_sets.append(tuple(float(r) for r in entry))
        rate_sets = tuple(parsed_sets)

    diag.raise_if_any()
    return ExperimentConfig(
        scenario=scenario, atmosphere=atmosphere, rytov_variances=rytov_out,
        users=users, zeta_db=zeta_out, rho_db=rho_out, schemes=schemes,
        p_aim=p_aim, rate_unit=rate_unit, mc=mc, output=output,
        target_rate_sets=rate_sets)


def load_experiment_config(path: str | Path) -> ExperimentConfig:
    p = Path(path)
    try:
        raw = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError([f"{p}: cannot read config: {exc}"]) from exc
    return parse_experiment_config(raw, str(p))
