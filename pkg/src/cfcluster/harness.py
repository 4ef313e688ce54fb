"""Monte Carlo orchestration over setups, realizations, architectures and precoders.

Randomness is drawn from keyed streams, so every number depends only on
``(seed, setup, purpose[, realization])`` and never on execution order.
Within a setup the same small-scale draws, shadowing and UE positions are
reused for every cluster grid, architecture and precoder (common random
numbers); only the AP positions change with the grid because APs are
dropped per cluster rectangle.

Peak memory per worker is dominated by the channel batch and one precoder
batch, each ``R * K_T * N * L_T`` complex scalars, plus the MMSE Gram
matrices of one chunk of realizations.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from . import complexity
from .channel import large_scale, unit_gaussian
from .config import PRESETS, NetworkConfig
from .evaluation import SEReport, SINRAccumulator, accumulate, aggregate_cdf, finalize_sinr, se_from_sinr
from .exceptions import CFClusterError, ConfigError, SimulationError
from .precoding import ARCHITECTURES, SCHEMES, Precoder
from .topology import build_deployment

__all__ = ["split_stream", "ExperimentPlan", "ExperimentResult", "run", "run_setup"]

log = logging.getLogger(__name__)


def _encode_label(label) -> int:
    # injective map into non-negative ints: ints even, strings odd
    if isinstance(label, (bool, np.bool_)):
        raise TypeError("boolean stream labels are ambiguous")
    if isinstance(label, (int, np.integer)):
        if label < 0:
            raise ValueError("integer stream labels must be non-negative")
        return 2 * int(label)
    if isinstance(label, str):
        return 2 * int.from_bytes(b"\x01" + label.encode("utf-8"), "big") + 1
    raise TypeError(f"unsupported stream label {label!r}")


def split_stream(seed: int, *labels) -> np.random.Generator:
    """Independent generator for the key ``labels`` under ``seed``.

    The key is a path such as ``(setup, "channel", realization)``; identical
    paths give identical streams and distinct paths give statistically
    independent ones (``numpy.random.SeedSequence`` spawn keys).
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_encode_label(x) for x in labels))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class ExperimentPlan:
    """Everything a run depends on.

    ``cfg.cluster_grid`` is ignored by :func:`run`; each grid in
    ``cluster_grids`` is simulated in turn.
    """

    cfg: NetworkConfig = field(default_factory=NetworkConfig)
    architectures: tuple = ARCHITECTURES
    precoders: tuple = SCHEMES
    cluster_grids: tuple = ((2, 1), (2, 2), (2, 4))

    def __post_init__(self):
        object.__setattr__(self, "architectures", tuple(self.architectures))
        object.__setattr__(self, "precoders", tuple(self.precoders))
        object.__setattr__(self, "cluster_grids",
                           tuple(tuple(int(v) for v in g) for g in self.cluster_grids))
        self.validate()

    def validate(self):
        if not self.architectures:
            raise ConfigError("no architecture selected", key="architectures")
        if not self.precoders:
            raise ConfigError("no precoder selected", key="precoders")
        if not self.cluster_grids:
            raise ConfigError("no cluster grid selected", key="cluster_grids")
        for a in self.architectures:
            if a not in ARCHITECTURES:
                raise ConfigError(f"unknown architecture {a!r}", key="architectures")
        for p in self.precoders:
            if p not in SCHEMES:
                raise ConfigError(f"unknown precoder {p!r}", key="precoders")
        for g in self.cluster_grids:
            self.cfg_for(g)

    def cfg_for(self, grid) -> NetworkConfig:
        return self.cfg.replace(cluster_grid=tuple(grid))

    @classmethod
    def from_preset(cls, name: str, cfg: NetworkConfig | None = None, **kw) -> "ExperimentPlan":
        try:
            preset = PRESETS[name]
        except KeyError:
            raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
        cfg = (cfg or NetworkConfig()).replace(n_setups=preset.n_setups,
                                               n_realizations=preset.n_realizations)
        kw.setdefault("cluster_grids", preset.cluster_grids)
        return cls(cfg=cfg, **kw)

    def keys(self):
        """Result keys ``(architecture, scheme, grid)`` in output order."""
        return [(a, p, g) for g in self.cluster_grids for a in self.architectures for p in self.precoders]


@dataclass
class ExperimentResult:
    plan: ExperimentPlan
    reports: dict
    per_setup: dict
    normalization_error: dict
    complexity: list


def run_setup(plan: ExperimentPlan, s: int) -> tuple[dict, dict]:
    """Per-UE SE and normalization error of every result key for setup ``s``."""
    cfg = plan.cfg
    seed = cfg.seed
    R = cfg.n_realizations
    se, norm_err = {}, {}
    try:
        z = np.stack([
            unit_gaussian(split_stream(seed, s, "channel", r), (cfg.n_ues, cfg.n_aps, cfg.n_antennas))
            for r in range(R)
        ])
        for grid in plan.cluster_grids:
            cfg_g = plan.cfg_for(grid)
            dep = build_deployment(cfg_g, split_stream(seed, s, "placement"))
            ls = large_scale(dep, cfg_g, split_stream(seed, s, "shadowing"))
            H = np.sqrt(ls.beta)[None, ..., None] * z
            for arch in plan.architectures:
                for scheme in plan.precoders:
                    est = Precoder.from_config(cfg_g, scheme, arch)
                    W = est.fit_transform(H)
                    energy = np.mean(np.sum(np.abs(W) ** 2, axis=-1), axis=0)
                    live = est.rho_ > 0
                    err = np.abs(energy[live] - est.rho_[live]) / est.rho_[live]
                    acc = accumulate(SINRAccumulator(cfg.n_ues), H, W)
                    key = (arch, scheme, grid)
                    se[key] = se_from_sinr(finalize_sinr(acc, cfg.sigma2))
                    norm_err[key] = float(err.max()) if err.size else 0.0
    except SimulationError:
        raise
    except (CFClusterError, np.linalg.LinAlgError, ValueError) as exc:
        raise SimulationError(str(exc), setup=s) from exc
    return se, norm_err


def run(plan: ExperimentPlan, workers: int = 1) -> ExperimentResult:
    """Run every setup and pool per-UE SE into one CDF per result key.

    Results do not depend on ``workers``: setups are independent, each uses
    its own keyed streams, and pooling happens in setup order.
    """
    plan.validate()
    n = plan.cfg.n_setups
    job = partial(run_setup, plan)
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(job, range(n)))
    else:
        outputs = []
        for s in range(n):
            outputs.append(job(s))
            log.info("setup %d/%d done", s + 1, n)

    per_setup, reports, norm_error = {}, {}, {}
    for key in plan.keys():
        arch, scheme, grid = key
        per_setup[key] = np.stack([out[0][key] for out in outputs])
        norm_error[key] = max(out[1][key] for out in outputs)
        reports[key] = aggregate_cdf(per_setup[key], arch, scheme, grid)

    cfg = plan.cfg
    clusters = sorted({rows * cols for rows, cols in plan.cluster_grids} | {1})
    table = complexity.ratio_table(cfg.n_antennas, cfg.n_aps, cfg.n_ues, clusters)
    return ExperimentResult(plan, reports, per_setup, norm_error, table)

