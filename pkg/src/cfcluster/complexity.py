"""Exact complex-multiplication counts for MMSE precoder computation.

Each count covers one coherence block and all ``K_T`` UEs: building the
Gram matrix, one Cholesky-based inverse, and one matrix-vector product per
processing unit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "precoder_cost",
    "count_centralized",
    "count_distributed",
    "count_cluster",
    "ComplexityReport",
    "ratio_table",
    "format_table",
    "truncate",
]


def _exact_div(num: int, den: int) -> int:
    q, r = divmod(num, den)
    assert r == 0, f"{num} is not divisible by {den}"
    return q


def _check(**params):
    for name, value in params.items():
        if int(value) != value or value < 1:
            raise ValueError(f"{name} must be a positive integer, got {value!r}")


def precoder_cost(dim: int, n_ues: int) -> int:
    """Multiplications for one processing unit handling a ``dim``-dimensional channel."""
    gram = _exact_div(dim * dim + dim, 2) * n_ues
    solve = dim * dim
    inverse = _exact_div(dim ** 3 - dim, 3)
    return gram + solve + inverse


def count_centralized(N: int, L: int, M: int, K_T: int) -> int:
    _check(N=N, L=L, M=M, K_T=K_T)
    return precoder_cost(N * L * M, K_T)


def count_distributed(N: int, L_T: int, K_T: int) -> int:
    _check(N=N, L_T=L_T, K_T=K_T)
    return precoder_cost(N, K_T) * L_T


def count_cluster(N: int, L: int, M: int, K_T: int) -> int:
    _check(N=N, L=L, M=M, K_T=K_T)
    return precoder_cost(N * L, K_T) * M


@dataclass(frozen=True)
class ComplexityReport:
    scheme: str
    count: int
    params: dict
    ratio_to_centralized: Fraction

    @property
    def ratio(self) -> float:
        return float(self.ratio_to_centralized)

    def display_ratio(self, digits: int = 3) -> str:
        return truncate(self.ratio_to_centralized, digits)


def truncate(value: Fraction, digits: int = 3) -> str:
    """Decimal string of a non-negative fraction cut (not rounded) after ``digits`` places."""
    value = Fraction(value)
    if value < 0:
        raise ValueError("expected a non-negative value")
    scaled = value.numerator * 10 ** digits // value.denominator
    whole, frac = divmod(scaled, 10 ** digits)
    return f"{whole}.{frac:0{digits}d}" if digits else str(whole)


def ratio_table(N: int = 4, L_T: int = 96, K_T: int = 40, clusters=(1, 2, 4, 8, 16)):
    """Centralized, distributed and per-``M`` cluster-based counts.

    Returns a list of :class:`ComplexityReport`: the centralized entry, the
    distributed entry, then one cluster-based entry per value in
    ``clusters``.
    """
    central = count_centralized(N, L_T, 1, K_T)
    base = {"N": N, "L_T": L_T, "K_T": K_T}
    out = [
        ComplexityReport("centralized", central, dict(base, M=1, L=L_T), Fraction(1)),
        ComplexityReport("distributed", count_distributed(N, L_T, K_T), dict(base, M=L_T, L=1),
                         Fraction(count_distributed(N, L_T, K_T), central)),
    ]
    for M in clusters:
        if L_T % M:
            raise ValueError(f"{L_T} APs cannot be split into {M} clusters")
        L = L_T // M
        c = count_cluster(N, L, M, K_T)
        out.append(ComplexityReport("cluster", c, dict(base, M=M, L=L), Fraction(c, central)))
    return out


def format_table(reports, sep=",") -> str:
    """Render reports as rows Centralized / Cluster-Based / Complexity Ratio by cluster count.

    Counts are exact integers. Ratios are truncated to three decimals, which
    is how the reference table displays them. The distributed count is
    appended as its own row since it does not depend on ``M``.
    """
    central = next(r for r in reports if r.scheme == "centralized")
    dist = next((r for r in reports if r.scheme == "distributed"), None)
    clus = [r for r in reports if r.scheme == "cluster"]
    header = ["scheme"] + [str(r.params["M"]) for r in clus]
    rows = [
        header,
        ["Centralized"] + [str(central.count)] * len(clus),
        ["Cluster-Based"] + [str(r.count) for r in clus],
        ["Complexity Ratio"] + [r.display_ratio() for r in clus],
    ]
    if dist is not None:
        rows.append(["Distributed"] + [str(dist.count)] * len(clus))
    return "".join(sep.join(row) + "\n" for row in rows)
