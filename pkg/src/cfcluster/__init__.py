"""Downlink simulator for centralized, distributed and cluster-based cell-free massive MIMO."""

__version__ = "0.1.0"

from .config import NetworkConfig, PRESETS  # noqa: E402
from .exceptions import (  # noqa: E402
    CFClusterError,
    ConfigError,
    DegenerateChannelError,
    FactorizationError,
    SimulationError,
)
from .topology import Deployment, build_deployment, cluster_rectangles  # noqa: E402
from .channel import ChannelRealization, LargeScale, draw_realization, large_scale  # noqa: E402
from .precoding import Precoder, PrecoderSet, allocate_power, normalize  # noqa: E402
from .evaluation import SEReport, SINRAccumulator, aggregate_cdf, finalize_sinr, se_from_sinr  # noqa: E402
from .harness import ExperimentPlan, ExperimentResult, run, split_stream  # noqa: E402

__all__ = [
    "NetworkConfig",
    "PRESETS",
    "CFClusterError",
    "ConfigError",
    "DegenerateChannelError",
    "FactorizationError",
    "SimulationError",
    "Deployment",
    "build_deployment",
    "cluster_rectangles",
    "ChannelRealization",
    "LargeScale",
    "draw_realization",
    "large_scale",
    "Precoder",
    "PrecoderSet",
    "allocate_power",
    "normalize",
    "SEReport",
    "SINRAccumulator",
    "aggregate_cdf",
    "finalize_sinr",
    "se_from_sinr",
    "ExperimentPlan",
    "ExperimentResult",
    "run",
    "split_stream",
]
