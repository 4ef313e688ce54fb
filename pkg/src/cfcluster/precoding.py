"""MR and MMSE precoders for centralized, distributed and cluster-based operation.

All three architectures share one representation. The ``L_T`` APs, ordered
cluster-major, are grouped into ``B`` equal processing blocks and each block
designs a precoder from its own stacked channel:

============== ======== ===========
architecture   blocks   block size
============== ======== ===========
centralized    1        N L_T
cluster        M        N L
distributed    L_T      N
============== ======== ===========

Precoder arrays therefore have shape ``(R, K, B, D)``: realization, UE,
block and block entry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .channel import block_view
from .config import NetworkConfig
from .exceptions import DegenerateChannelError, FactorizationError
from .validation import check_channel_batch, check_positive, check_powers

__all__ = [
    "ARCHITECTURES",
    "SCHEMES",
    "n_blocks",
    "hpd_solve",
    "mr_direction",
    "mmse_directions",
    "mmse_direction_cluster",
    "mmse_direction_centralized",
    "mmse_direction_distributed",
    "PowerPolicy",
    "allocate_power",
    "normalize",
    "PrecoderSet",
    "Precoder",
]

ARCHITECTURES = ("centralized", "distributed", "cluster")
SCHEMES = ("mr", "mmse")

# above this block size a per-matrix LAPACK triangular solve beats the
# vectorized substitution loop
_SUBSTITUTION_MAX_DIM = 24


def n_blocks(architecture: str, n_aps: int, n_clusters: int = 1) -> int:
    if architecture == "centralized":
        return 1
    if architecture == "distributed":
        return n_aps
    if architecture == "cluster":
        if n_aps % n_clusters:
            raise ValueError(f"{n_aps} APs cannot be split into {n_clusters} clusters")
        return n_clusters
    raise ValueError(f"unknown architecture {architecture!r}; expected one of {ARCHITECTURES}")


# --------------------------------------------------------------------------
# linear algebra
# --------------------------------------------------------------------------

def _forward_substitution(Lc, B):
    # batched solve of Lc Y = B with Lc lower triangular
    Y = np.empty(np.broadcast_shapes(Lc.shape[:-2], B.shape[:-2]) + B.shape[-2:],
                 dtype=np.result_type(Lc, B))
    for i in range(Lc.shape[-1]):
        acc = B[..., i, :]
        if i:
            acc = acc - np.einsum("...j,...jk->...k", Lc[..., i, :i], Y[..., :i, :])
        Y[..., i, :] = acc / Lc[..., i, i, None]
    return Y


def _backward_substitution(U, B):
    # batched solve of U X = B with U upper triangular
    n = U.shape[-1]
    X = np.empty(np.broadcast_shapes(U.shape[:-2], B.shape[:-2]) + B.shape[-2:],
                 dtype=np.result_type(U, B))
    for i in range(n - 1, -1, -1):
        acc = B[..., i, :]
        if i < n - 1:
            acc = acc - np.einsum("...j,...jk->...k", U[..., i, i + 1:], X[..., i + 1:, :])
        X[..., i, :] = acc / U[..., i, i, None]
    return X


def hpd_solve(A, B):
    """Solve ``A X = B`` for Hermitian positive-definite ``A`` via Cholesky.

    Both arguments may carry matching leading batch axes. Each ``A`` is
    factored once and the factor is reused for every column of ``B``.

    Raises
    ------
    FactorizationError
        If any matrix in the batch is not numerically positive definite.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    try:
        Lc = np.linalg.cholesky(A)
    except np.linalg.LinAlgError as exc:
        raise FactorizationError(f"Cholesky factorization failed: {exc}") from None
    if not np.all(np.isfinite(Lc)):
        raise FactorizationError("Cholesky factor is not finite")

    n = A.shape[-1]
    if n <= _SUBSTITUTION_MAX_DIM:
        Y = _forward_substitution(Lc, B)
        return _backward_substitution(np.conj(np.swapaxes(Lc, -1, -2)), Y)

    batch = np.broadcast_shapes(Lc.shape[:-2], B.shape[:-2])
    Lc = np.broadcast_to(Lc, batch + Lc.shape[-2:]).reshape((-1, n, n))
    Bf = np.broadcast_to(B, batch + B.shape[-2:]).reshape((-1,) + B.shape[-2:])
    X = np.empty(Bf.shape, dtype=np.result_type(Lc, Bf))
    for j in range(Lc.shape[0]):
        X[j] = scipy.linalg.cho_solve((Lc[j], True), Bf[j], check_finite=False)
    return X.reshape(batch + B.shape[-2:])


# --------------------------------------------------------------------------
# precoder directions
# --------------------------------------------------------------------------

def mr_direction(h_view):
    """Maximum-ratio direction: the channel view itself."""
    return np.array(h_view, copy=True)


def mmse_directions(H, p, sigma2):
    """MMSE directions of every UE from the stacked channels ``H``.

    Parameters
    ----------
    H : array_like, shape (..., D, K)
        Column ``i`` is UE ``i``'s channel seen by the processing unit.
    p : float or array_like, shape (K,)
        Uplink powers weighting the Gram matrix.
    sigma2 : float
        Noise power.

    Returns
    -------
    ndarray, shape (..., D, K)
        Column ``k`` is ``p_k (sum_i p_i h_i h_i^H + sigma2 I)^{-1} h_k``.
    """
    H = np.asarray(H)
    if not np.iscomplexobj(H):
        H = H.astype(complex)
    D, K = H.shape[-2:]
    p = check_powers(p, K)
    sigma2 = check_positive(sigma2, "sigma2")
    # work with A / sigma2 so the diagonal loading is exactly one
    q = p / sigma2
    A = (H * q) @ np.conj(np.swapaxes(H, -1, -2))
    A[..., np.arange(D), np.arange(D)] += 1.0
    return hpd_solve(A, H) * q


def _single(H, k, p, sigma2, expected_dim=None):
    H = np.asarray(H)
    if H.ndim != 2:
        raise ValueError(f"expected a (D, K) channel matrix, got shape {H.shape}")
    if expected_dim is not None and H.shape[0] != expected_dim:
        raise ValueError(f"channel matrix has {H.shape[0]} rows, expected {expected_dim}")
    if not 0 <= k < H.shape[1]:
        raise IndexError(f"UE index {k} out of range [0, {H.shape[1]})")
    return mmse_directions(H, p, sigma2)[:, k]


def mmse_direction_cluster(H_m, k, p, sigma2):
    """MMSE direction of UE ``k`` computed by one cluster, length ``L N``.

    ``H_m`` has shape ``(L N, K_T)``: the cluster views of every UE.
    """
    return _single(H_m, k, p, sigma2)


def mmse_direction_centralized(H, k, p, sigma2, n_antennas=None, n_aps=None):
    """MMSE direction of UE ``k`` designed from network-wide CSI, length ``N L_T``."""
    dim = n_antennas * n_aps if n_antennas and n_aps else None
    return _single(H, k, p, sigma2, dim)


def mmse_direction_distributed(H_q, k, p, sigma2, n_antennas=None):
    """MMSE direction of UE ``k`` designed by AP ``q`` alone, length ``N``."""
    return _single(H_q, k, p, sigma2, n_antennas)


def _raw_directions(Hb, scheme, p, sigma2, chunk):
    # Hb: (R, K, B, D) -> raw directions, same shape
    if scheme == "mr":
        return mr_direction(Hb)
    if scheme != "mmse":
        raise ValueError(f"unknown precoding scheme {scheme!r}; expected one of {SCHEMES}")
    R = Hb.shape[0]
    out = np.empty_like(Hb)
    for start in range(0, R, chunk):
        blk = Hb[start:start + chunk]
        # (r, K, B, D) -> (r, B, D, K)
        cols = np.transpose(blk, (0, 2, 3, 1))
        W = mmse_directions(cols, p, sigma2)
        out[start:start + chunk] = np.transpose(W, (0, 3, 1, 2))
    return out


# --------------------------------------------------------------------------
# power allocation and normalization
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PowerPolicy:
    """Per-vector transmit power ``rho[k, b]`` in mW."""

    architecture: str
    rho: np.ndarray
    aps_per_block: int

    @property
    def total(self) -> float:
        return float(self.rho.sum())

    def block_totals(self) -> np.ndarray:
        return self.rho.sum(axis=0)


def allocate_power(cfg: NetworkConfig, architecture: str, n_clusters=None) -> PowerPolicy:
    """Equal split of each processing block's power budget over all UEs.

    A block controlling ``a`` APs owns ``a * p_ap`` mW and gives each UE
    ``a * p_ap / K_T``. Every architecture therefore radiates the same
    network total ``L_T * p_ap``.
    """
    n_clusters = cfg.n_clusters if n_clusters is None else n_clusters
    B = n_blocks(architecture, cfg.n_aps, n_clusters)
    per_block = cfg.n_aps // B
    rho = np.full((cfg.n_ues, B), per_block * cfg.p_ap / cfg.n_ues)
    return PowerPolicy(architecture, rho, per_block)


def normalize(raw, rho, zero_ok=False):
    """Scale raw directions so their batch-mean energy equals ``rho``.

    Parameters
    ----------
    raw : array_like, shape (R, ..., D)
        Raw directions over ``R`` realizations; the expectation of the
        squared norm is estimated by the sample mean over axis 0.
    rho : float or array_like broadcastable to ``raw.shape[1:-1]``
    zero_ok : bool
        If true, vectors whose whole batch is zero stay zero. Otherwise an
        all-zero batch raises.

    Returns
    -------
    w : ndarray
        Normalized precoders, same shape as ``raw``.
    scale : ndarray, shape ``raw.shape[1:-1]``
        Factor applied to every realization of each vector.
    """
    raw = np.asarray(raw)
    if raw.ndim < 2 or raw.shape[0] == 0:
        raise ValueError("normalize needs a non-empty batch of vectors")
    rho = np.broadcast_to(np.asarray(rho, dtype=float), raw.shape[1:-1])
    if np.any(rho < 0):
        raise ValueError("rho must be non-negative")
    energy = np.mean(np.sum(np.abs(raw) ** 2, axis=-1), axis=0)
    zero = energy == 0
    if np.any(zero & ~np.asarray(zero_ok)):
        raise DegenerateChannelError(f"{int(zero.sum())} precoder batch(es) have zero energy")
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(zero, 0.0, np.sqrt(rho / np.where(zero, 1.0, energy)))
    return raw * scale[None, ..., None], scale


# --------------------------------------------------------------------------
# estimator
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PrecoderSet:
    """Normalized precoders ``w[r, k, b, :]`` for one architecture and scheme."""

    architecture: str
    scheme: str
    w: np.ndarray
    rho: np.ndarray

    @property
    def n_blocks(self) -> int:
        return self.w.shape[2]

    def flat(self) -> np.ndarray:
        """Network-wide stacked vectors ``(R, K, N L_T)``."""
        R, K, B, D = self.w.shape
        return self.w.reshape(R, K, B * D)

    def vectors(self, k: int, r: int = 0) -> np.ndarray:
        """All block vectors of UE ``k`` in realization ``r``, shape ``(B, D)``."""
        return self.w[r, k]


class Precoder(BaseEstimator, TransformerMixin):
    """Downlink precoder with power normalization estimated from a batch.

    ``fit`` computes raw directions for a batch of channel realizations
    drawn under fixed large-scale fading and stores the per-(UE, block)
    scale factor that brings the batch-mean energy of each vector to its
    allocated power. ``transform`` applies that scale to the raw
    directions of any channel batch.

    Parameters
    ----------
    scheme : {"mr", "mmse"}
    architecture : {"centralized", "distributed", "cluster"}
    n_clusters : int
        Number of clusters; only read when ``architecture="cluster"``.
    p_ul : float or array_like
        Uplink powers (mW) used by MMSE.
    sigma2 : float
        Noise power (mW) used by MMSE.
    p_ap : float
        Per-AP power budget (mW).
    chunk_size : int
        Realizations per MMSE batch; bounds peak memory of the Gram matrices.

    Attributes
    ----------
    n_blocks_ : int
    rho_ : ndarray, shape (K, B)
    scale_ : ndarray, shape (K, B)
    energy_ : ndarray, shape (K, B)
        Batch-mean squared norm of the raw directions.
    """

    def __init__(self, scheme="mmse", architecture="cluster", n_clusters=1, p_ul=100.0,
                 sigma2=10 ** -9.4, p_ap=1000.0, chunk_size=16):
        self.scheme = scheme
        self.architecture = architecture
        self.n_clusters = n_clusters
        self.p_ul = p_ul
        self.sigma2 = sigma2
        self.p_ap = p_ap
        self.chunk_size = chunk_size

    @classmethod
    def from_config(cls, cfg: NetworkConfig, scheme: str, architecture: str, **kw):
        return cls(scheme=scheme, architecture=architecture, n_clusters=cfg.n_clusters,
                   p_ul=cfg.p_ul, sigma2=cfg.sigma2, p_ap=cfg.p_ap, **kw)

    def directions(self, X):
        """Raw (unnormalized) directions, shape ``(R, K, B, D)``."""
        X = check_channel_batch(X)
        B = n_blocks(self.architecture, X.shape[2], self.n_clusters)
        Hb = block_view(X, B)
        return _raw_directions(Hb, self.scheme, self.p_ul, self.sigma2, max(1, int(self.chunk_size)))

    def _fit(self, raw):
        R, K, B, D = raw.shape
        n_aps = B * D // self._n_antennas
        rho = np.full((K, B), (n_aps // B) * self.p_ap / K)
        w, scale = normalize(raw, rho, zero_ok=True)
        self.n_blocks_ = B
        self.rho_ = np.where(scale > 0, rho, 0.0)
        self.scale_ = scale
        self.energy_ = np.mean(np.sum(np.abs(raw) ** 2, axis=-1), axis=0)
        return w

    def fit(self, X, y=None):
        X = check_channel_batch(X)
        self._n_antennas = X.shape[3]
        self._fit(self.directions(X))
        return self

    def fit_transform(self, X, y=None, **fit_params):
        X = check_channel_batch(X)
        self._n_antennas = X.shape[3]
        return self._fit(self.directions(X))

    def transform(self, X):
        check_is_fitted(self, "scale_")
        raw = self.directions(X)
        if raw.shape[1:3] != self.scale_.shape:
            raise ValueError(f"fitted for (K, B) = {self.scale_.shape}, got {raw.shape[1:3]}")
        return raw * self.scale_[None, ..., None]

    def precoder_set(self, X) -> PrecoderSet:
        """Fit on ``X`` and wrap the normalized precoders."""
        w = self.fit_transform(X)
        return PrecoderSet(self.architecture, self.scheme, w, self.rho_)
