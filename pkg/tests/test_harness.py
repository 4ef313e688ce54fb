import math

import numpy as np
import pytest

from cfcluster import ExperimentPlan, NetworkConfig, SimulationError, run, split_stream
from cfcluster import harness
from cfcluster.channel import pathloss_db


def tiny_cfg(**kw):
    base = dict(n_aps=4, n_ues=3, n_antennas=2, n_setups=2, n_realizations=8, seed=11)
    base.update(kw)
    return NetworkConfig(**base)


def test_same_key_same_stream():
    a = split_stream(5, 3, "channel", 7).standard_normal(16)
    b = split_stream(5, 3, "channel", 7).standard_normal(16)
    assert np.array_equal(a, b)


def test_sibling_streams_uncorrelated():
    a = split_stream(5, 0, "channel", 0).standard_normal(100_000)
    b = split_stream(5, 0, "channel", 1).standard_normal(100_000)
    c = split_stream(5, 1, "channel", 0).standard_normal(100_000)
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.01
    assert abs(np.corrcoef(a, c)[0, 1]) < 0.01


def test_stream_independent_of_call_order():
    first = split_stream(1, 2, "placement").uniform(size=4)
    split_stream(1, 9, "shadowing").uniform(size=1000)
    again = split_stream(1, 2, "placement").uniform(size=4)
    assert np.array_equal(first, again)


def test_labels_do_not_collide():
    a = split_stream(0, 1).uniform(size=4)
    b = split_stream(0, "1").uniform(size=4)
    assert not np.array_equal(a, b)
    with pytest.raises(TypeError):
        split_stream(0, True)


def test_hand_trace_single_link():
    # one setup, one UE, one single-antenna AP, MR: SE is rebuilt from raw stream draws
    cfg = NetworkConfig(n_aps=1, n_ues=1, n_antennas=1, n_setups=1, n_realizations=2, seed=3)
    plan = ExperimentPlan(cfg, ("centralized",), ("mr",), ((1, 1),))
    se = run(plan).per_setup[("centralized", "mr", (1, 1))][0, 0]

    rng = split_stream(3, 0, "placement")
    ue = rng.uniform(0, 980.0, (1, 2))
    ap = rng.uniform(0, 1, (1, 2)) * 980.0
    d = math.sqrt(np.sum((ue - ap) ** 2) + 100.0)
    beta_db = pathloss_db(d) + split_stream(3, 0, "shadowing").normal(0, 4.0)
    beta = 10 ** (beta_db / 10)
    z = []
    for r in range(2):
        re, im = split_stream(3, 0, "channel", r).standard_normal(2)
        z.append((re + 1j * im) * math.sqrt(0.5))
    h = np.sqrt(beta) * np.array(z)
    rho = 1000.0
    w = h * math.sqrt(rho / np.mean(np.abs(h) ** 2))
    g = np.conj(h) * w
    S = g.mean()
    C = np.mean(np.abs(g) ** 2)
    sigma2 = 10 ** -9.4
    expected = math.log2(1 + abs(S) ** 2 / (max(C - abs(S) ** 2, 0) + sigma2))
    assert se == pytest.approx(expected, rel=1e-10)


def test_run_is_deterministic():
    plan = ExperimentPlan(tiny_cfg(), cluster_grids=((2, 1),))
    a, b = run(plan), run(plan)
    for key in plan.keys():
        assert np.array_equal(a.per_setup[key], b.per_setup[key])


def test_one_cluster_matches_centralized():
    plan = ExperimentPlan(tiny_cfg(), ("centralized", "cluster"), cluster_grids=((1, 1),))
    res = run(plan)
    for scheme in ("mr", "mmse"):
        c = res.per_setup[("centralized", scheme, (1, 1))]
        k = res.per_setup[("cluster", scheme, (1, 1))]
        assert np.allclose(c, k, rtol=1e-9)


def test_result_keys_and_shapes():
    plan = ExperimentPlan(tiny_cfg(), cluster_grids=((1, 1), (2, 2)))
    res = run(plan)
    assert list(res.reports) == plan.keys()
    assert len(plan.keys()) == 2 * 3 * 2
    for key in plan.keys():
        assert res.per_setup[key].shape == (2, 3)
        assert res.reports[key].n == 6
        assert res.normalization_error[key] < 1e-12
    assert [r.params.get("M") for r in res.complexity if r.scheme == "cluster"] == [1, 4]


def test_failure_reports_setup(monkeypatch):
    real = harness.large_scale

    def broken(dep, cfg, rng):
        raise ValueError("synthetic failure")

    monkeypatch.setattr(harness, "large_scale", broken)
    with pytest.raises(SimulationError) as info:
        run(ExperimentPlan(tiny_cfg(), cluster_grids=((1, 1),)))
    assert info.value.setup == 0
    monkeypatch.setattr(harness, "large_scale", real)


def test_workers_do_not_change_results():
    plan = ExperimentPlan(tiny_cfg(n_setups=3), cluster_grids=((2, 1),))
    a, b = run(plan, workers=1), run(plan, workers=2)
    for key in plan.keys():
        assert np.array_equal(a.per_setup[key], b.per_setup[key])


def test_plan_validation():
    from cfcluster import ConfigError
    with pytest.raises(ConfigError):
        ExperimentPlan(tiny_cfg(), architectures=())
    with pytest.raises(ConfigError):
        ExperimentPlan(tiny_cfg(), precoders=("zf",))
    with pytest.raises(ConfigError):
        ExperimentPlan(tiny_cfg(), cluster_grids=((3, 1),))


def test_presets():
    plan = ExperimentPlan.from_preset("desk")
    assert plan.cfg.n_setups == 20 and plan.cfg.n_realizations == 100
    assert (2, 2) in plan.cluster_grids
    full = ExperimentPlan.from_preset("full")
    assert full.cfg.n_setups == 100 and full.cfg.n_realizations == 300
