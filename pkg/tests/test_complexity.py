from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cfcluster.complexity import (
    count_centralized,
    count_cluster,
    count_distributed,
    format_table,
    precoder_cost,
    ratio_table,
    truncate,
)


def hand_cost(x, K):
    # float-free evaluation of the three cost terms
    return (x * x + x) * K // 2 + x * x + (x ** 3 - x) // 3


def test_centralized_reference():
    assert count_centralized(4, 96, 1, 40) == 21_978_496


def test_smallest_cases():
    assert count_centralized(1, 1, 1, 1) == 2
    assert count_centralized(2, 1, 1, 1) == 9


def test_distributed_examples():
    assert count_distributed(4, 96, 40) == 38_400 + 1_536 + 1_920 == 41_856
    assert count_distributed(4, 1, 1) == 46
    for K, L_T in [(1, 1), (3, 7), (40, 96)]:
        assert count_distributed(1, L_T, K) == K * L_T + L_T


def test_cluster_examples():
    assert count_cluster(4, 48, 2, 40) == 6_274_432
    assert count_cluster(4, 24, 4, 40) == 1_961_344
    assert count_cluster(4, 96, 1, 40) == count_centralized(4, 96, 1, 40)


@given(st.integers(1, 10_000))
def test_divisions_are_exact(x):
    assert (x * x + x) % 2 == 0
    assert (x ** 3 - x) % 3 == 0
    assert precoder_cost(x, 7) == hand_cost(x, 7)


@given(st.integers(1, 8), st.integers(1, 12), st.integers(1, 8), st.integers(1, 50))
def test_degeneracy_identities(N, L, M, K):
    assert count_cluster(N, L * M, 1, K) == count_centralized(N, L, M, K)
    assert count_cluster(N, 1, L * M, K) == count_distributed(N, L * M, K)


def test_large_dimension_exact():
    # NLM = 10^4 stays exact in Python ints
    c = count_centralized(10, 1000, 1, 40)
    assert c == hand_cost(10_000, 40)


@pytest.mark.parametrize("M,expected", [(1, 1.0), (2, 0.285), (4, 0.089), (8, 0.031), (16, 0.012)])
def test_ratio_table_reference(M, expected):
    rep = {r.params["M"]: r for r in ratio_table() if r.scheme == "cluster"}[M]
    assert abs(rep.ratio - expected) <= 1e-3
    assert rep.display_ratio() == f"{expected:.3f}"


def test_ratio_is_exact_fraction():
    rep = [r for r in ratio_table() if r.scheme == "cluster"]
    assert rep[1].ratio_to_centralized == Fraction(6_274_432, 21_978_496)


@pytest.mark.parametrize("N,L_T,K_T", [(4, 96, 40), (1, 64, 10), (8, 48, 100)])
def test_ratio_strictly_decreasing(N, L_T, K_T):
    Ms = [M for M in range(1, L_T + 1) if L_T % M == 0]
    ratios = [r.ratio_to_centralized for r in ratio_table(N, L_T, K_T, Ms) if r.scheme == "cluster"]
    assert all(a > b for a, b in zip(ratios, ratios[1:]))


def test_rejects_bad_params():
    with pytest.raises(ValueError):
        count_cluster(0, 1, 1, 1)
    with pytest.raises(ValueError):
        ratio_table(clusters=(5,))


def test_truncate():
    assert truncate(Fraction(274_816, 21_978_496)) == "0.012"
    assert truncate(Fraction(1)) == "1.000"
    assert truncate(Fraction(2, 3), 2) == "0.66"


def test_format_table_layout():
    text = format_table(ratio_table())
    lines = text.splitlines()
    assert lines[0] == "scheme,1,2,4,8,16"
    assert lines[1] == ",".join(["Centralized"] + ["21978496"] * 5)
    assert lines[2] == "Cluster-Based,21978496,6274432,1961344,689536,274816"
    assert lines[3] == "Complexity Ratio,1.000,0.285,0.089,0.031,0.012"
    assert lines[4].startswith("Distributed,41856")
    assert "\r" not in text
