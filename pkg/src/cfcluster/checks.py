"""Fast self-checks behind ``cfcluster check``."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import complexity
from .channel import unit_gaussian
from .evaluation import SINRAccumulator, accumulate, finalize_sinr
from .harness import split_stream
from .precoding import Precoder, hpd_solve


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str


def _rel(a, b):
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


def check_complexity():
    table = {r.params["M"]: r for r in complexity.ratio_table() if r.scheme == "cluster"}
    central = complexity.count_centralized(4, 96, 1, 40)
    expected = {2: 0.285, 4: 0.089, 8: 0.031, 16: 0.012}
    worst = max(abs(table[M].ratio - v) for M, v in expected.items())
    ok = central == 21_978_496 and worst <= 1e-3 and table[1].count == central
    return CheckResult("complexity table", ok, f"centralized={central} max ratio dev={worst:.4f}")


def check_degeneracy(n_instances=20, seed=1):
    worst = 0.0
    for t in range(n_instances):
        rng = split_stream(seed, "degeneracy", t)
        N, L_T, K = int(rng.integers(1, 3)), int(rng.integers(1, 9)), int(rng.integers(1, 5))
        beta = 10 ** rng.uniform(-2, 0, size=(K, L_T))
        H = np.sqrt(beta)[None, ..., None] * unit_gaussian(rng, (4, K, L_T, N))
        for scheme in ("mmse", "mr"):
            pairs = [(("cluster", 1), ("centralized", 1)), (("cluster", L_T), ("distributed", 1))]
            for (a1, m1), (a2, m2) in pairs:
                w1 = Precoder(scheme, a1, m1, sigma2=0.1).fit_transform(H)
                w2 = Precoder(scheme, a2, m2, sigma2=0.1).fit_transform(H)
                worst = max(worst, _rel(w1, w2))
                s1 = finalize_sinr(accumulate(SINRAccumulator(K), H, w1), 0.1)
                s2 = finalize_sinr(accumulate(SINRAccumulator(K), H, w2), 0.1)
                worst = max(worst, _rel(s1, s2))
    return CheckResult("architecture degeneracy", worst < 1e-9, f"max rel err={worst:.2e}")


def check_hardening_bound(seed=2):
    rng = split_stream(seed, "hardening")
    K, L_T, N, sigma2 = 3, 4, 2, 0.5
    h = unit_gaussian(rng, (K, L_T, N))
    w = unit_gaussian(rng, (K, L_T * N))
    acc = accumulate(SINRAccumulator(K), np.stack([h, h]), np.stack([w, w]))
    g = np.conj(h.reshape(K, -1)) @ w.T
    direct = np.array([abs(g[k, k]) ** 2 / (np.sum(np.abs(np.delete(g[k], k)) ** 2) + sigma2)
                       for k in range(K)])
    err = _rel(finalize_sinr(acc, sigma2), direct)
    return CheckResult("deterministic-channel SINR", err < 1e-12, f"rel err={err:.2e}")


def check_solver(seed=3):
    rng = split_stream(seed, "solver")
    worst = 0.0
    for D in (3, 40):
        Hs = unit_gaussian(rng, (5, D, 6))
        A = Hs @ np.conj(np.swapaxes(Hs, -1, -2)) + 0.3 * np.eye(D)
        B = unit_gaussian(rng, (5, D, 4))
        worst = max(worst, _rel(A @ hpd_solve(A, B), B))
    return CheckResult("Hermitian PD solver", worst < 1e-10, f"max rel residual={worst:.2e}")


def check_normalization(seed=4):
    rng = split_stream(seed, "normalization")
    H = unit_gaussian(rng, (10, 5, 8, 2)) * 1e-4
    est = Precoder("mmse", "cluster", 2, sigma2=1e-9)
    W = est.fit_transform(H)
    energy = np.mean(np.sum(np.abs(W) ** 2, axis=-1), axis=0)
    err = _rel(energy, est.rho_)
    return CheckResult("batch power normalization", err < 1e-12, f"rel err={err:.2e}")


ALL_CHECKS = (check_complexity, check_degeneracy, check_hardening_bound, check_solver, check_normalization)


def run_checks():
    return [fn() for fn in ALL_CHECKS]
