"""Input validation helpers shared by the estimators and the evaluator."""

from __future__ import annotations

import numpy as np

__all__ = ["check_channel_batch", "check_powers", "check_positive"]


def check_channel_batch(X, n_aps=None, name="X") -> np.ndarray:
    """Coerce ``X`` into a complex ``(R, K, L_T, N)`` array.

    A single realization ``(K, L_T, N)`` is promoted to a batch of one.
    """
    X = np.asarray(X)
    if X.ndim == 3:
        X = X[None]
    if X.ndim != 4:
        raise ValueError(f"{name} must have shape (R, K, L_T, N) or (K, L_T, N), got {X.shape}")
    if not np.iscomplexobj(X):
        X = X.astype(complex)
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains NaN or inf")
    if n_aps is not None and X.shape[2] != n_aps:
        raise ValueError(f"{name} has {X.shape[2]} APs, expected {n_aps}")
    return X


def check_powers(p, n_ues: int, name="p") -> np.ndarray:
    """Broadcast a scalar or length-``n_ues`` power vector and check positivity."""
    p = np.broadcast_to(np.asarray(p, dtype=float), (n_ues,))
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise ValueError(f"{name} must be finite and non-negative")
    return p


def check_positive(value, name: str) -> float:
    value = float(value)
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value
