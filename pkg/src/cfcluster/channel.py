"""Large-scale fading and Rayleigh small-scale channel generation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import NetworkConfig
from .topology import Deployment

__all__ = [
    "LargeScale",
    "ChannelRealization",
    "pathloss_db",
    "large_scale",
    "unit_gaussian",
    "draw_realization",
    "draw_realizations",
    "block_view",
    "view_cluster",
    "view_centralized",
    "view_distributed",
]


def pathloss_db(d) -> np.ndarray:
    """Log-distance pathloss in dB (3.76 exponent, 1 m reference) for distances in meters."""
    return -30.5 - 37.6 * np.log10(np.asarray(d, dtype=float))


@dataclass(frozen=True)
class LargeScale:
    """Large-scale fading of every (UE, AP) pair, shape ``(n_ues, n_aps)``."""

    beta_db: np.ndarray

    @property
    def beta(self) -> np.ndarray:
        return 10.0 ** (self.beta_db / 10.0)

    @classmethod
    def from_linear(cls, beta) -> "LargeScale":
        with np.errstate(divide="ignore"):
            return cls(10.0 * np.log10(np.asarray(beta, dtype=float)))


def large_scale(dep: Deployment, cfg: NetworkConfig, rng: np.random.Generator) -> LargeScale:
    """Pathloss plus i.i.d. log-normal shadowing per (UE, AP) pair."""
    shadow = rng.normal(0.0, cfg.sigma_sf, size=dep.d.shape)
    return LargeScale(pathloss_db(dep.d) + shadow)


def unit_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """Samples of CN(0, 1): independent N(0, 1/2) real and imaginary parts."""
    z = rng.standard_normal(size=tuple(shape) + (2,))
    return (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)


@dataclass(frozen=True)
class ChannelRealization:
    """Channel tensor ``h[..., k, l, n]`` from antenna ``n`` of AP ``l`` to UE ``k``.

    Leading batch axes (realizations) are allowed. ``ap_cluster`` must be
    non-decreasing so that stacking cluster views in order reproduces the
    network-wide vector.
    """

    h: np.ndarray
    ap_cluster: np.ndarray | None = None

    def __post_init__(self):
        if self.h.ndim < 3:
            raise ValueError(f"channel tensor needs (..., K, L, N) axes, got shape {self.h.shape}")
        if self.ap_cluster is None:
            object.__setattr__(self, "ap_cluster", np.zeros(self.h.shape[-2], dtype=int))
        ap = np.asarray(self.ap_cluster)
        if ap.shape != (self.h.shape[-2],):
            raise ValueError("ap_cluster length does not match the AP axis")
        if np.any(np.diff(ap) < 0):
            raise ValueError("APs must be ordered cluster-major")

    @property
    def n_ues(self) -> int:
        return self.h.shape[-3]

    @property
    def n_aps(self) -> int:
        return self.h.shape[-2]

    @property
    def n_antennas(self) -> int:
        return self.h.shape[-1]

    @property
    def n_clusters(self) -> int:
        return int(np.max(self.ap_cluster)) + 1

    def view_cluster(self, k: int, m: int) -> np.ndarray:
        return view_cluster(self, k, m)

    def view_centralized(self, k: int) -> np.ndarray:
        return view_centralized(self, k)

    def view_distributed(self, k: int, q: int) -> np.ndarray:
        return view_distributed(self, k, q)


def _check_ue(h: ChannelRealization, k: int):
    if not 0 <= k < h.n_ues:
        raise IndexError(f"UE index {k} out of range [0, {h.n_ues})")


def view_cluster(h: ChannelRealization, k: int, m: int) -> np.ndarray:
    """Stack of the slices of every AP in cluster ``m``, length ``L * N``."""
    _check_ue(h, k)
    if not 0 <= m < h.n_clusters:
        raise IndexError(f"cluster index {m} out of range [0, {h.n_clusters})")
    members = np.flatnonzero(h.ap_cluster == m)
    sl = h.h[..., k, members, :]
    return sl.reshape(sl.shape[:-2] + (-1,))


def view_centralized(h: ChannelRealization, k: int) -> np.ndarray:
    """Network-wide channel of UE ``k``, length ``N * L_T``."""
    _check_ue(h, k)
    sl = h.h[..., k, :, :]
    return sl.reshape(sl.shape[:-2] + (-1,))


def view_distributed(h: ChannelRealization, k: int, q: int) -> np.ndarray:
    """Slice of a single AP ``q``, length ``N``."""
    _check_ue(h, k)
    if not 0 <= q < h.n_aps:
        raise IndexError(f"AP index {q} out of range [0, {h.n_aps})")
    return h.h[..., k, q, :]


def block_view(h: np.ndarray, n_blocks: int) -> np.ndarray:
    """Reshape ``(..., K, L_T, N)`` into ``(..., K, B, L_T N / B)``.

    Consecutive APs are grouped into ``n_blocks`` equal blocks: ``1`` gives
    the centralized vector, ``L_T`` the per-AP slices, and ``M`` the cluster
    views of a cluster-major deployment.
    """
    *lead, K, L_T, N = h.shape
    if L_T % n_blocks:
        raise ValueError(f"{L_T} APs cannot be split into {n_blocks} equal blocks")
    return h.reshape(*lead, K, n_blocks, (L_T // n_blocks) * N)


def draw_realization(ls: LargeScale, cfg: NetworkConfig, rng: np.random.Generator,
                     ap_cluster=None) -> ChannelRealization:
    """One Rayleigh realization ``h[k, l] ~ CN(0, beta[k, l] I_N)``."""
    z = unit_gaussian(rng, ls.beta_db.shape + (cfg.n_antennas,))
    return ChannelRealization(np.sqrt(ls.beta)[..., None] * z, ap_cluster)


def draw_realizations(ls: LargeScale, n_antennas: int, rngs) -> np.ndarray:
    """Stack one realization per generator, shape ``(R, K, L_T, N)``."""
    amp = np.sqrt(ls.beta)[..., None]
    shape = ls.beta_db.shape + (n_antennas,)
    return np.stack([amp * unit_gaussian(rng, shape) for rng in rngs])
