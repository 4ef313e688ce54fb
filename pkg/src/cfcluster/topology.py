"""Simulation geometry: cluster tiling, AP/UE placement and distances."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .config import NetworkConfig

__all__ = ["Rect", "Deployment", "cluster_rectangles", "build_deployment", "distances"]


class Rect(NamedTuple):
    """Axis-aligned rectangle ``[x0, x1) x [y0, y1)``."""

    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    @property
    def area(self) -> float:
        return self.width * self.height

    def contains(self, x, y):
        return (x >= self.x0) & (x <= self.x1) & (y >= self.y0) & (y <= self.y1)


def cluster_rectangles(cfg: NetworkConfig) -> list[Rect]:
    """Tile the square into ``rows x cols`` congruent rectangles.

    Rows stack along y and columns along x, so each rectangle is
    ``area_side / cols`` wide and ``area_side / rows`` tall. Indexing is
    row-major: cluster ``m`` sits in row ``m // cols``, column ``m % cols``.
    """
    rows, cols = cfg.cluster_grid
    side = float(cfg.area_side)
    xs = np.linspace(0.0, side, cols + 1)
    ys = np.linspace(0.0, side, rows + 1)
    return [
        Rect(float(xs[c]), float(ys[r]), float(xs[c + 1]), float(ys[r + 1]))
        for r in range(rows)
        for c in range(cols)
    ]


def distances(ue_pos: np.ndarray, ap_pos: np.ndarray) -> np.ndarray:
    """Euclidean UE-to-AP distances, shape ``(n_ues, n_aps)``."""
    diff = ue_pos[:, None, :] - ap_pos[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


@dataclass(frozen=True)
class Deployment:
    """AP and UE positions for one setup.

    APs are stored cluster-major: the APs of cluster 0 come first, then those
    of cluster 1, and so on. Every channel view relies on this ordering.

    Attributes
    ----------
    ap_pos : ndarray, shape (n_aps, 3)
    ue_pos : ndarray, shape (n_ues, 3)
    ap_cluster : ndarray of int, shape (n_aps,)
        0-based cluster index of each AP, non-decreasing.
    d : ndarray, shape (n_ues, n_aps)
        3-D distances in meters.
    """

    ap_pos: np.ndarray
    ue_pos: np.ndarray
    ap_cluster: np.ndarray
    d: np.ndarray

    @property
    def n_aps(self) -> int:
        return self.ap_pos.shape[0]

    @property
    def n_ues(self) -> int:
        return self.ue_pos.shape[0]

    @property
    def n_clusters(self) -> int:
        return int(self.ap_cluster.max()) + 1

    def cluster_members(self, m: int) -> np.ndarray:
        return np.flatnonzero(self.ap_cluster == m)


def build_deployment(cfg: NetworkConfig, rng: np.random.Generator) -> Deployment:
    """Drop UEs uniformly over the square and exactly L APs per cluster.

    The draw order is fixed (UE coordinates first, then one unit-square
    offset per AP) and does not depend on the cluster grid, so two grids
    built from the same stream share UE positions and per-AP offsets.
    """
    cfg.validate()
    side = float(cfg.area_side)
    L = cfg.aps_per_cluster

    ue_xy = rng.uniform(0.0, side, size=(cfg.n_ues, 2))
    offsets = rng.uniform(0.0, 1.0, size=(cfg.n_aps, 2))

    rects = cluster_rectangles(cfg)
    ap_cluster = np.repeat(np.arange(cfg.n_clusters), L)
    lo = np.array([(r.x0, r.y0) for r in rects])[ap_cluster]
    size = np.array([(r.width, r.height) for r in rects])[ap_cluster]
    ap_xy = lo + offsets * size

    ap_pos = np.column_stack([ap_xy, np.full(cfg.n_aps, float(cfg.ap_height))])
    ue_pos = np.column_stack([ue_xy, np.zeros(cfg.n_ues)])
    return Deployment(ap_pos=ap_pos, ue_pos=ue_pos, ap_cluster=ap_cluster,
                      d=distances(ue_pos, ap_pos))
