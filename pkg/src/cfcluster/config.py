"""Network configuration and named presets."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

from .exceptions import ConfigError

__all__ = ["NetworkConfig", "dbm_to_mw", "mw_to_dbm", "PRESETS"]


def dbm_to_mw(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0)


def mw_to_dbm(mw: float) -> float:
    return 10.0 * math.log10(mw)


@dataclass(frozen=True)
class NetworkConfig:
    """Parameters of one cell-free deployment.

    Defaults reproduce the reference scenario: a 980 m square with 96
    four-antenna APs and 40 single-antenna UEs. Powers are in mW, the noise
    power is given in dBm and exposed in mW through :attr:`sigma2`.

    Parameters
    ----------
    area_side : float
        Side of the square coverage area, meters.
    n_aps, n_ues, n_antennas : int
        Total APs, total UEs and antennas per AP.
    cluster_grid : tuple of int
        ``(rows, cols)`` partition of the area into ``rows * cols`` clusters.
    p_ul : float
        Uplink power of every UE, used to weight the MMSE Gram matrix.
    p_ap : float
        Maximum downlink transmit power per AP.
    noise_dbm : float
        Receiver noise power.
    sigma_sf : float
        Shadow fading standard deviation, dB.
    ap_height : float
        Vertical offset between APs and UEs, meters.
    bandwidth : float
        Carried as metadata only (Hz).
    """

    area_side: float = 980.0
    n_aps: int = 96
    n_ues: int = 40
    n_antennas: int = 4
    cluster_grid: tuple = (1, 1)
    p_ul: float = 100.0
    p_ap: float = 1000.0
    noise_dbm: float = -94.0
    sigma_sf: float = 4.0
    ap_height: float = 10.0
    bandwidth: float = 20e6
    n_setups: int = 100
    n_realizations: int = 300
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "cluster_grid", tuple(int(v) for v in self.cluster_grid))
        self.validate()

    def validate(self):
        if len(self.cluster_grid) != 2 or min(self.cluster_grid) < 1:
            raise ConfigError(f"cluster_grid must be two positive ints, got {self.cluster_grid}",
                              key="cluster_grid")
        for name in ("n_aps", "n_ues", "n_antennas", "n_setups", "n_realizations"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be >= 1", key=name)
        for name in ("area_side", "p_ul", "p_ap", "bandwidth"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive", key=name)
        if self.sigma_sf < 0:
            raise ConfigError("sigma_sf must be non-negative", key="sigma_sf")
        if self.ap_height < 0:
            raise ConfigError("ap_height must be non-negative", key="ap_height")
        if self.n_aps % self.n_clusters:
            raise ConfigError(
                f"n_aps={self.n_aps} is not divisible by the {self.n_clusters} clusters "
                f"of grid {self.cluster_grid[0]}x{self.cluster_grid[1]}",
                key="cluster_grid",
            )

    @property
    def n_clusters(self) -> int:
        return self.cluster_grid[0] * self.cluster_grid[1]

    @property
    def aps_per_cluster(self) -> int:
        return self.n_aps // self.n_clusters

    @property
    def sigma2(self) -> float:
        """Noise power in mW."""
        return dbm_to_mw(self.noise_dbm)

    def replace(self, **changes) -> "NetworkConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["cluster_grid"] = list(self.cluster_grid)
        return d


@dataclass(frozen=True)
class Preset:
    n_setups: int
    n_realizations: int
    cluster_grids: tuple = field(default_factory=tuple)


PRESETS = {
    # full reference-scale Monte Carlo
    "full": Preset(100, 300, ((2, 1), (2, 2), (2, 4))),
    # reduced profile for CI and the ordering checks
    "desk": Preset(20, 100, ((1, 1), (2, 1), (2, 2), (2, 4))),
}
