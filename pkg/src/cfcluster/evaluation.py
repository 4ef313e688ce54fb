"""Hardening-bound SINR/SE estimation and CDF aggregation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .precoding import PrecoderSet
from .validation import check_channel_batch

__all__ = [
    "effective_gains",
    "SINRAccumulator",
    "accumulate",
    "finalize_sinr",
    "se_from_sinr",
    "SEReport",
    "aggregate_cdf",
]


def effective_gains(h, w) -> np.ndarray:
    """Effective scalar channels ``g[r, k, i] = sum_b h_{k,b}^H w_{i,b}``.

    Parameters
    ----------
    h : array_like, shape (R, K, L_T, N) or (K, L_T, N)
    w : PrecoderSet or array_like, shape (R, K, B, D) or (R, K, N L_T)
        Block vectors must stack, in block order, to the AP order of ``h``.
    """
    h = check_channel_batch(h, name="h")
    R, K, L_T, N = h.shape
    W = w.flat() if isinstance(w, PrecoderSet) else np.asarray(w)
    if W.ndim == 4:
        W = W.reshape(W.shape[0], W.shape[1], -1)
    if W.ndim == 2:
        W = W[None]
    if W.shape != (R, K, L_T * N):
        raise ValueError(f"precoders of shape {W.shape} do not match channels {h.shape}")
    return np.conj(h.reshape(R, K, L_T * N)) @ np.swapaxes(W, -1, -2)


@dataclass
class SINRAccumulator:
    """Running moments over realizations for every UE.

    ``signal_mean[k]`` is the mean of ``g_kk``, ``self_m2[k]`` the sum of
    squared deviations of ``g_kk`` from that mean, and ``cross_sum[k, i]``
    accumulates ``|g_ki|^2``. The self-gain variance is tracked with the
    pairwise (Chan) update rather than as ``E|g|^2 - |E g|^2``, which would
    cancel catastrophically on high-SINR links. Two accumulators merge
    with ``+``.
    """

    n_ues: int
    signal_mean: np.ndarray = None
    self_m2: np.ndarray = None
    cross_sum: np.ndarray = None
    count: int = 0

    def __post_init__(self):
        if self.signal_mean is None:
            self.signal_mean = np.zeros(self.n_ues, dtype=complex)
        if self.self_m2 is None:
            self.self_m2 = np.zeros(self.n_ues)
        if self.cross_sum is None:
            self.cross_sum = np.zeros((self.n_ues, self.n_ues))

    def _merged(self, count, mean, m2, cross):
        n = self.count + count
        if count == 0:
            return self.signal_mean, self.self_m2, self.cross_sum + cross, self.count
        delta = mean - self.signal_mean
        new_mean = self.signal_mean + delta * (count / n)
        new_m2 = self.self_m2 + m2 + np.abs(delta) ** 2 * (self.count * count / n)
        return new_mean, new_m2, self.cross_sum + cross, n

    def add_gains(self, g) -> "SINRAccumulator":
        g = np.asarray(g)
        if g.ndim == 2:
            g = g[None]
        if g.shape[1:] != (self.n_ues, self.n_ues):
            raise ValueError(f"gain tensor {g.shape} does not match {self.n_ues} UEs")
        diag = np.einsum("rkk->rk", g)
        mean = diag.mean(axis=0)
        m2 = np.sum(np.abs(diag - mean) ** 2, axis=0)
        cross = np.sum(np.abs(g) ** 2, axis=0)
        self.signal_mean, self.self_m2, self.cross_sum, self.count = self._merged(g.shape[0], mean, m2, cross)
        return self

    def __add__(self, other: "SINRAccumulator") -> "SINRAccumulator":
        if other.n_ues != self.n_ues:
            raise ValueError("cannot merge accumulators over different UE sets")
        mean, m2, cross, n = self._merged(other.count, other.signal_mean, other.self_m2, other.cross_sum)
        return SINRAccumulator(self.n_ues, mean, m2, cross, n)

    @property
    def cross_mean(self) -> np.ndarray:
        return self.cross_sum / self.count

    @property
    def self_variance(self) -> np.ndarray:
        """Population variance of ``g_kk`` over the accumulated realizations."""
        return self.self_m2 / self.count

    @property
    def interference(self) -> np.ndarray:
        """Mean inter-UE leakage ``sum_{i != k} C_ki``."""
        off = self.cross_sum * (1.0 - np.eye(self.n_ues))
        return off.sum(axis=1) / self.count


def accumulate(acc: SINRAccumulator, h, W) -> SINRAccumulator:
    """Add one or more realizations of channels ``h`` and precoders ``W``."""
    return acc.add_gains(effective_gains(h, W))


def finalize_sinr(acc: SINRAccumulator, sigma2: float) -> np.ndarray:
    """Per-UE SINR of the hardening bound from accumulated moments.

    ``SINR_k = |S_k|^2 / (sum_i C_ki - |S_k|^2 + sigma2)``, evaluated as
    ``|S_k|^2 / (Var(g_kk) + sum_{i != k} C_ki + sigma2)``. Both forms are
    algebraically equal; the second is non-negative by construction and
    keeps full precision when the beamforming gain dwarfs the noise.
    """
    if acc.count < 2:
        raise ValueError(f"need at least 2 realizations, got {acc.count}")
    S2 = np.abs(acc.signal_mean) ** 2
    return S2 / (acc.self_variance + acc.interference + sigma2)


def se_from_sinr(sinr):
    """Spectral efficiency in bit/s/Hz."""
    sinr = np.asarray(sinr, dtype=float)
    if np.any(sinr < 0):
        raise ValueError("SINR must be non-negative")
    return np.log2(1.0 + sinr)


@dataclass(frozen=True)
class SEReport:
    """Pooled per-UE SE samples with their empirical CDF."""

    samples: np.ndarray
    architecture: str = ""
    scheme: str = ""
    grid: tuple = ()
    cdf: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        s = np.sort(np.asarray(self.samples, dtype=float))
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "cdf", np.arange(1, s.size + 1) / s.size)

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def median(self) -> float:
        return float(np.median(self.samples))

    @property
    def mean(self) -> float:
        return float(np.mean(self.samples))

    def percentile(self, q: float) -> float:
        return float(np.percentile(self.samples, q))

    def summary(self) -> dict:
        return {
            "n": self.n,
            "median": self.median,
            "mean": self.mean,
            "p10": self.percentile(10),
            "p90": self.percentile(90),
            "min": float(self.samples[0]),
            "max": float(self.samples[-1]),
        }

    def points(self):
        return list(zip(self.samples.tolist(), self.cdf.tolist()))


def aggregate_cdf(samples, architecture="", scheme="", grid=()) -> SEReport:
    samples = np.ravel(np.asarray(samples, dtype=float))
    if samples.size == 0:
        raise ValueError("cannot build a CDF from an empty sample")
    if np.any(samples < 0) or not np.all(np.isfinite(samples)):
        raise ValueError("SE samples must be finite and non-negative")
    return SEReport(samples, architecture, scheme, tuple(grid))
