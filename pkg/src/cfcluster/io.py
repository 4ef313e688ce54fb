"""Config files, result serialization and the run manifest.

Config files are plain ``key = value`` lines. ``#`` starts a comment. Keys
are the :class:`~cfcluster.config.NetworkConfig` field names, the plan
selections ``architectures``, ``precoders`` and ``cluster_grids``, or one of
the symbol aliases in :data:`ALIASES` (``L_T``, ``K_T``, ``N``, ``P_ap`` ...).
"""

from __future__ import annotations

import csv
import dataclasses
import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone

from . import __version__
from .complexity import format_table
from .config import NetworkConfig
from .exceptions import ConfigError
from .harness import ExperimentPlan, ExperimentResult

__all__ = [
    "ALIASES",
    "read_config",
    "plan_from_mapping",
    "parse_config",
    "parse_grid",
    "format_grid",
    "dump_config",
    "RunManifest",
    "write_results",
    "write_complexity",
    "result_filename",
]

ALIASES = {
    "L_T": "n_aps",
    "K_T": "n_ues",
    "N": "n_antennas",
    "P_ap": "p_ap",
    "p_k": "p_ul",
    "noise_power_dbm": "noise_dbm",
    "area": "area_side",
    "grids": "cluster_grids",
    "grid": "cluster_grids",
    "setups": "n_setups",
    "realizations": "n_realizations",
}

_FIELDS = {f.name: f for f in dataclasses.fields(NetworkConfig)}
_PLAN_KEYS = ("architectures", "precoders", "cluster_grids")
_INT_FIELDS = {"n_aps", "n_ues", "n_antennas", "n_setups", "n_realizations", "seed"}
_ARCH_ALIASES = {"cluster-based": "cluster", "cluster_based": "cluster", "central": "centralized",
                 "dist": "distributed"}


def parse_grid(text: str) -> tuple:
    """``"3x2"`` -> ``(3, 2)``."""
    parts = text.strip().lower().replace("×", "x").split("x")
    if len(parts) != 2:
        raise ValueError(f"grid {text!r} must look like ROWSxCOLS")
    rows, cols = (int(p) for p in parts)
    if rows < 1 or cols < 1:
        raise ValueError(f"grid {text!r} must have positive dimensions")
    return rows, cols


def format_grid(grid) -> str:
    return f"{grid[0]}x{grid[1]}"


def _split_list(value: str):
    return [v.strip() for v in value.replace(";", ",").split(",") if v.strip()]


def _convert(key, raw, line=None):
    try:
        if key == "cluster_grids":
            return tuple(parse_grid(v) for v in _split_list(raw))
        if key == "cluster_grid":
            return parse_grid(raw)
        if key == "architectures":
            return tuple(_ARCH_ALIASES.get(v.lower(), v.lower()) for v in _split_list(raw))
        if key == "precoders":
            return tuple(v.lower() for v in _split_list(raw))
        if key in _INT_FIELDS:
            value = float(raw)
            if value != int(value):
                raise ValueError("expected an integer")
            return int(value)
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value {raw!r}: {exc}", key=key, line=line) from None


def read_config(path) -> dict:
    """Explicit ``{key: (value, line)}`` entries of a config file, aliases resolved."""
    entries = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, text in enumerate(fh, start=1):
            text = text.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigError(f"expected 'key = value', got {text!r}", line=lineno)
            key, raw = (t.strip() for t in text.split("=", 1))
            key = ALIASES.get(key, key)
            if key not in _FIELDS and key not in _PLAN_KEYS:
                raise ConfigError("unknown key", key=key, line=lineno)
            if key in entries:
                raise ConfigError("duplicate key", key=key, line=lineno)
            entries[key] = (_convert(key, raw, lineno), lineno)
    return entries


def plan_from_mapping(values: dict, base: ExperimentPlan | None = None, lines=None) -> ExperimentPlan:
    """Apply ``values`` on top of ``base`` (reference defaults when omitted)."""
    base = base or ExperimentPlan()
    lines = lines or {}
    cfg_changes = {k: v for k, v in values.items() if k in _FIELDS}
    for key in ("p_ul", "p_ap", "area_side", "bandwidth"):
        if key in cfg_changes and not cfg_changes[key] > 0:
            raise ConfigError("must be positive", key=key, line=lines.get(key))
    try:
        cfg = base.cfg.replace(**cfg_changes)
    except ConfigError as exc:
        if exc.line is None and exc.key in lines:
            raise ConfigError(str(exc).split("] ", 1)[-1], key=exc.key, line=lines[exc.key]) from None
        raise
    plan_kw = {k: values.get(k, getattr(base, k)) for k in _PLAN_KEYS}
    try:
        return ExperimentPlan(cfg=cfg, **plan_kw)
    except ConfigError as exc:
        key = "cluster_grids" if exc.key == "cluster_grid" else exc.key
        if exc.line is None and key in lines:
            raise ConfigError(str(exc).split("] ", 1)[-1], key=key, line=lines[key]) from None
        raise


def parse_config(path, base: ExperimentPlan | None = None) -> ExperimentPlan:
    """Read a config file; omitted keys keep the reference defaults."""
    entries = read_config(path)
    return plan_from_mapping({k: v for k, (v, _) in entries.items()}, base,
                             {k: ln for k, (_, ln) in entries.items()})


def dump_config(plan: ExperimentPlan) -> str:
    """Serialize ``plan`` so that ``parse_config`` restores it exactly."""
    out = []
    for name in _FIELDS:
        value = getattr(plan.cfg, name)
        if name == "cluster_grid":
            text = format_grid(value)
        else:
            text = repr(value)
        out.append(f"{name} = {text}")
    out.append("architectures = " + ", ".join(plan.architectures))
    out.append("precoders = " + ", ".join(plan.precoders))
    out.append("cluster_grids = " + ", ".join(format_grid(g) for g in plan.cluster_grids))
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# results
# --------------------------------------------------------------------------

def result_filename(key) -> str:
    arch, scheme, grid = key
    return f"se_{arch}_{scheme}_{format_grid(grid)}.csv"


def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_complexity(reports, path):
    _write_text(path, format_table(reports))


@dataclass
class RunManifest:
    config: dict
    plan: dict
    version: str
    seed: int
    started: str
    finished: str
    files: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2) + "\n"

    def network_config(self) -> NetworkConfig:
        cfg = dict(self.config)
        cfg["cluster_grid"] = tuple(cfg["cluster_grid"])
        return NetworkConfig(**cfg)


def utc_now():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def write_results(result: ExperimentResult, out_dir, started: str | None = None) -> RunManifest:
    """Write per-key CDF CSVs, ``summary.json``, ``complexity.csv`` and ``manifest.json``.

    Every file except the manifest is a pure function of the plan and seed,
    so repeated runs can be compared byte for byte.
    """
    plan = result.plan
    started = started or utc_now()
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out_dir!r}: {exc}") from exc

    files = []
    summaries = []
    for key in plan.keys():
        rep = result.reports[key]
        name = result_filename(key)
        with open(os.path.join(out_dir, name), "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["se_bits_per_hz", "cdf"])
            for x, c in rep.points():
                writer.writerow([repr(float(x)), repr(float(c))])
        files.append(name)
        entry = {"architecture": key[0], "precoder": key[1], "grid": format_grid(key[2]),
                 "clusters": key[2][0] * key[2][1], "file": name}
        entry.update(rep.summary())
        entry["normalization_max_rel_error"] = result.normalization_error[key]
        summaries.append(entry)

    summary = {
        "config": plan.cfg.to_dict(),
        "sigma2_mw": plan.cfg.sigma2,
        "results": summaries,
    }
    _write_text(os.path.join(out_dir, "summary.json"), json.dumps(summary, indent=2) + "\n")
    files.append("summary.json")

    write_complexity(result.complexity, os.path.join(out_dir, "complexity.csv"))
    files.append("complexity.csv")

    manifest = RunManifest(
        config=plan.cfg.to_dict(),
        plan={"architectures": list(plan.architectures), "precoders": list(plan.precoders),
              "cluster_grids": [format_grid(g) for g in plan.cluster_grids]},
        version=__version__,
        seed=plan.cfg.seed,
        started=started,
        finished=utc_now(),
        files=files,
    )
    _write_text(os.path.join(out_dir, "manifest.json"), manifest.to_json())
    return manifest
