import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfcluster import SINRAccumulator, aggregate_cdf, finalize_sinr, se_from_sinr
from cfcluster.channel import unit_gaussian
from cfcluster.evaluation import accumulate, effective_gains


def repeat(x, R=2):
    return np.stack([x] * R)


def test_hand_built_gains():
    # two single-antenna UEs on one single-antenna AP
    h = np.array([[[1.0]], [[0.5]]], dtype=complex)
    w = np.array([[1.0], [0.2]], dtype=complex)
    g = effective_gains(h, w)[0]
    assert g[0, 0] == pytest.approx(1.0)
    assert g[0, 1] == pytest.approx(0.2)
    assert g[1, 0] == pytest.approx(0.5)
    assert g[1, 1] == pytest.approx(0.1)


def test_deterministic_single_ue_bound_is_exact():
    rng = np.random.default_rng(0)
    h = unit_gaussian(rng, (1, 3, 2))
    rho, s2 = 4.0, 0.7
    hv = h.reshape(-1)
    w = (hv / np.linalg.norm(hv) * math.sqrt(rho))[None]
    acc = accumulate(SINRAccumulator(1), repeat(h, 5), repeat(w, 5))
    assert finalize_sinr(acc, s2)[0] == pytest.approx(rho * np.vdot(hv, hv).real / s2, rel=1e-12)


def test_zero_variance_identity():
    # S=2 and C=4, so Var(g)=0 and the bracket is pure noise
    acc = SINRAccumulator(1, np.array([2.0 + 0j]), np.array([0.0]), np.array([[8.0]]), count=2)
    sinr = finalize_sinr(acc, 1.0)
    assert sinr[0] == pytest.approx(4.0)
    assert se_from_sinr(sinr)[0] == pytest.approx(math.log2(5))


def test_orthogonal_channels_have_no_interference():
    h = np.zeros((2, 2, 1), dtype=complex)
    h[0, 0, 0] = 1.0
    h[1, 1, 0] = 2.0
    w = h.reshape(2, 2).copy()
    acc = accumulate(SINRAccumulator(2), repeat(h), repeat(w))
    C = acc.cross_mean
    assert C[0, 1] == 0 and C[1, 0] == 0
    assert finalize_sinr(acc, 1.0) == pytest.approx([1.0, 16.0])


def test_random_phase_precoders_collapse_the_bound():
    rng = np.random.default_rng(42)
    R = 20_000
    h = np.ones((R, 1, 1, 1), dtype=complex)
    w = np.exp(2j * np.pi * rng.uniform(size=(R, 1, 1)))
    sinr = finalize_sinr(accumulate(SINRAccumulator(1), h, w), 1e-9)
    assert sinr[0] < 5.0 / R


def test_se_values():
    assert se_from_sinr(0.0) == 0.0
    assert se_from_sinr(1.0) == 1.0
    assert se_from_sinr(4.0) == pytest.approx(2.3219, abs=1e-4)
    with pytest.raises(ValueError):
        se_from_sinr(-1.0)


def test_needs_two_realizations():
    acc = SINRAccumulator(1)
    with pytest.raises(ValueError):
        finalize_sinr(acc, 1.0)
    acc.add_gains(np.ones((1, 1, 1)))
    with pytest.raises(ValueError):
        finalize_sinr(acc, 1.0)


def test_dimension_mismatch():
    h = np.ones((2, 3, 4, 2), dtype=complex)
    with pytest.raises(ValueError):
        effective_gains(h, np.ones((2, 3, 4), dtype=complex))


def _random_case(seed, R=30, K=4, L_T=6, N=2):
    rng = np.random.default_rng(seed)
    return unit_gaussian(rng, (R, K, L_T, N)), unit_gaussian(rng, (R, K, L_T * N))


def test_block_and_flat_paths_agree():
    h, w = _random_case(1)
    blocks = w.reshape(30, 4, 3, 4)
    a = finalize_sinr(accumulate(SINRAccumulator(4), h, blocks), 0.1)
    b = finalize_sinr(accumulate(SINRAccumulator(4), h, w), 0.1)
    assert np.allclose(a, b, rtol=1e-12)
    # explicit per-block sum of inner products
    g = np.einsum("rkbd,ribd->rki", np.conj(h.reshape(30, 4, 3, 4)), blocks)
    assert np.allclose(g, effective_gains(h, w))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 29))
def test_accumulators_merge(seed, split):
    h, w = _random_case(seed)
    whole = accumulate(SINRAccumulator(4), h, w)
    parts = accumulate(SINRAccumulator(4), h[:split], w[:split]) + accumulate(SINRAccumulator(4), h[split:], w[split:])
    assert parts.count == whole.count
    assert np.allclose(parts.signal_mean, whole.signal_mean, rtol=1e-12)
    assert np.allclose(parts.self_m2, whole.self_m2, rtol=1e-12)
    assert np.allclose(parts.cross_sum, whole.cross_sum, rtol=1e-12)


def test_centered_signal_has_zero_mean():
    h, w = _random_case(3)
    g = effective_gains(h, w)
    acc = SINRAccumulator(4).add_gains(g)
    dev = np.einsum("rkk->rk", g) - acc.signal_mean
    assert np.allclose(dev.mean(axis=0), 0, atol=1e-12)


def test_variance_form_matches_raw_moments():
    h, w = _random_case(4, R=400)
    acc = accumulate(SINRAccumulator(4), h, w)
    g = effective_gains(h, w)
    C = np.mean(np.abs(g) ** 2, axis=0)
    S = np.mean(np.einsum("rkk->rk", g), axis=0)
    raw = np.abs(S) ** 2 / (C.sum(axis=1) - np.abs(S) ** 2 + 0.3)
    assert np.allclose(finalize_sinr(acc, 0.3), raw, rtol=1e-10)
    assert np.allclose(acc.self_variance, np.var(np.einsum("rkk->rk", g), axis=0), rtol=1e-12)


def test_extra_interferer_never_helps():
    rng = np.random.default_rng(5)
    g = unit_gaussian(rng, (50, 3, 3))
    base = finalize_sinr(SINRAccumulator(3).add_gains(g), 0.5)
    g2 = g.copy()
    g2[:, 0, 2] *= 3.0
    worse = finalize_sinr(SINRAccumulator(3).add_gains(g2), 0.5)
    assert worse[0] <= base[0]
    assert np.allclose(worse[1:], base[1:])


def test_high_sinr_keeps_precision():
    # |S|^2 / sigma2 = 1e12: a raw-moment bracket would lose every digit of the noise term
    g = np.full((4, 1, 1), 1e3 + 0j)
    acc = SINRAccumulator(1).add_gains(g)
    assert acc.self_m2[0] == 0.0
    assert finalize_sinr(acc, 1e-6)[0] == pytest.approx(1e12, rel=1e-14)


# ---------------------------------------------------------------- CDF

def test_cdf_points():
    rep = aggregate_cdf([3.0, 1.0, 2.0])
    assert rep.points() == [(1.0, 1 / 3), (2.0, 2 / 3), (3.0, 1.0)]


def test_cdf_steps_for_equal_samples():
    rep = aggregate_cdf([2.0] * 4)
    assert np.all(rep.samples == 2.0)
    assert np.allclose(rep.cdf, [0.25, 0.5, 0.75, 1.0])


def test_cdf_summary():
    rep = aggregate_cdf([0, 1, 2, 3, 4])
    assert rep.median == 2
    assert rep.mean == 2
    assert rep.summary()["n"] == 5


def test_cdf_rejects_empty_and_negative():
    with pytest.raises(ValueError):
        aggregate_cdf([])
    with pytest.raises(ValueError):
        aggregate_cdf([1.0, -0.1])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 50), min_size=1, max_size=200))
def test_cdf_is_monotone(values):
    rep = aggregate_cdf(values)
    assert np.all(np.diff(rep.cdf) > 0)
    assert np.all(np.diff(rep.samples) >= 0)
    assert rep.cdf[-1] == 1.0 and rep.cdf[0] > 0
