import json

import numpy as np
import pytest

from conftest import connected_random_net
from twolayer.errors import ParameterError, StructureError
from twolayer.estimators import degree_pdf, ground_truth
from twolayer.evaluation import (TrialConfig, canonical_method, mean_relative_error, nrmse,
                                 run_estimates, run_trials, sample_once)
from twolayer.graph import TwoLayerNetwork, build_bipartite, build_graph
from twolayer.rng import make_rng


def test_nrmse_examples():
    assert nrmse([0.3, 0.3], 0.3) == 0.0
    assert nrmse([0.0, 2.0], 1.0) == 1.0
    assert nrmse([1.25], 1.0) == pytest.approx(0.25)
    assert nrmse([1.0, 3.0, 2.0], 2.0) == nrmse([3.0, 2.0, 1.0], 2.0)
    with pytest.raises(ParameterError):
        nrmse([1.0], 0.0)
    with pytest.raises(ParameterError):
        nrmse([], 1.0)


def test_config_validation():
    assert TrialConfig("rwt_vsa").method == "RWT-VSA"
    assert canonical_method("vsa-ii") == "VSA-II"
    with pytest.raises(ParameterError):
        TrialConfig("MHRW")
    with pytest.raises(ParameterError):
        TrialConfig("RW", runs=0)
    with pytest.raises(ParameterError):
        TrialConfig("RW", budget_fraction=0.0)
    with pytest.raises(ParameterError):
        TrialConfig("RW", alpha=-1.0)
    assert TrialConfig("RW", budget_fraction=0.01).budget(1000) == 10


def star_network(n):
    star = build_bipartite([(u, 0) for u in range(n)], n, 1)
    return TwoLayerNetwork(build_graph([(0, 1), (1, 2), (2, 3)], n), build_graph([], 1), star)


def test_exhaustive_vsa2_star_has_zero_error():
    net = star_network(6)
    table = run_trials(net, TrialConfig("VSA-II", budget_fraction=1.0, runs=1), "pdf")
    assert np.all(table.nrmse <= 1e-15)
    assert table.degrees.tolist() == [0, 1, 2]


def test_zero_truth_bins_absent(barbell_small):
    table = run_trials(barbell_small, TrialConfig("VSA-I", budget_fraction=0.05, runs=3), "pdf")
    assert np.all(table.truth > 0)
    assert 0 not in table.degrees.tolist() and 1 not in table.degrees.tolist()


@pytest.mark.parametrize("method", ["RW", "RWwJ", "VSA-I", "VSA-II", "RWT-VSA", "RWT-RWA"])
def test_every_method_runs_and_is_deterministic(barbell_small, method):
    cfg = TrialConfig(method, alpha=5.0, beta=5.0, budget_fraction=0.02, runs=4, base_seed=9)
    a = run_trials(barbell_small, cfg, "ccdf")
    b = run_trials(barbell_small, cfg, "ccdf")
    assert np.array_equal(a.estimates, b.estimates)
    assert a.estimates.shape[0] == 4


def test_worker_count_does_not_change_results(barbell_small):
    cfg = TrialConfig("RWT-VSA", alpha=10.0, budget_fraction=0.01, runs=12, base_seed=3)
    one = run_trials(barbell_small, cfg, "ccdf", workers=1)
    three = run_trials(barbell_small, cfg, "ccdf", workers=3)
    assert np.array_equal(one.estimates, three.estimates)
    assert np.array_equal(one.nrmse, three.nrmse)


def test_trial_seeds_follow_xor_rule(barbell_small):
    cfg = TrialConfig("RWT-VSA", alpha=1.0, budget_fraction=0.01, runs=3, base_seed=40)
    est, _ = run_estimates(barbell_small, cfg, degree_pdf(2))
    for i in range(3):
        path = sample_once(barbell_small, cfg, make_rng(40 ^ i))
        w = path.weights
        f = (barbell_small.target.degrees[path.nodes] == 2)
        assert est[i, 0] == pytest.approx((f * w).sum() / w.sum(), rel=1e-14)


def test_burnin_discards_prefix(barbell_small):
    cfg = TrialConfig("RW", budget_fraction=0.01, runs=1, base_seed=1, burnin=5, start_nodes=(0,))
    path = sample_once(barbell_small, cfg, make_rng(1))
    full = sample_once(barbell_small, TrialConfig("RW", budget_fraction=0.015, runs=1, start_nodes=(0,)),
                       make_rng(1))
    assert len(path) == 10
    assert np.array_equal(path.nodes, full.nodes[5:])


def test_structural_errors_carry_context():
    net = TwoLayerNetwork(build_graph([], 3), build_graph([], 2), build_bipartite([], 3, 2))
    with pytest.raises(StructureError, match="VSA-I trials aborted"):
        run_trials(net, TrialConfig("VSA-I", budget_fraction=1.0, runs=2), "pdf")


def test_table_outputs(tmp_path, barbell_small):
    cfg = TrialConfig("RWT-VSA", alpha=10.0, beta=0.0, budget_fraction=0.01, runs=5, base_seed=2)
    table = run_trials(barbell_small, cfg, "ccdf")
    table.to_csv(tmp_path / "t.csv")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "degree,truth,nrmse,method,alpha,beta,budget,runs"
    assert lines[1].endswith(",RWT-VSA,10.0,0.0,10,5")
    table.to_json(tmp_path / "t.json")
    doc = json.loads((tmp_path / "t.json").read_text())
    assert len(doc["rows"]) == len(lines) - 1
    assert doc["config"]["base_seed"] == 2


def test_scalar_target(barbell_small):
    cfg = TrialConfig("VSA-II", budget_fraction=0.05, runs=5)
    table = run_trials(barbell_small, cfg, degree_pdf(2))
    assert table.degrees.tolist() == [2]
    assert table.truth[0] == ground_truth(barbell_small.target, degree_pdf(2))


@pytest.mark.parametrize("method", ["VSA-I", "VSA-II", "RWT-VSA", "RWwJ"])
def test_error_shrinks_with_budget(method):
    net = connected_random_net(60, 40, np.random.default_rng(12), p=0.08)
    f = degree_pdf(int(np.bincount(net.target.degrees).argmax()))
    theta = ground_truth(net.target, f)
    errs = []
    for frac in (0.2, 0.8):
        cfg = TrialConfig(method, alpha=3.0, budget_fraction=frac, runs=50, base_seed=77)
        est, _ = run_estimates(net, cfg, f)
        errs.append(np.median(np.abs(est[:, 0] - theta)))
    assert errs[1] < errs[0]


def test_rwt_vsa_mean_theta2_within_ten_percent(barbell_small):
    cfg = TrialConfig("RWT-VSA", alpha=10.0, budget_fraction=0.01, runs=200, base_seed=11)
    f = degree_pdf(2)
    est, _ = run_estimates(barbell_small, cfg, f)
    assert mean_relative_error(est[:, 0], ground_truth(barbell_small.target, f)) < 0.10


def test_trial_starts_recorded(tmp_path, barbell_small):
    cfg = TrialConfig("RW", budget_fraction=0.01, runs=4, base_seed=5, burnin=3, start_nodes=(7, 8, 9))
    table = run_trials(barbell_small, cfg, "ccdf", workers=2)
    assert set(table.starts.tolist()) <= {7, 8, 9}
    for i, s in enumerate(table.starts.tolist()):
        full = sample_once(barbell_small, TrialConfig("RW", budget_fraction=0.013, runs=1, start_nodes=(7, 8, 9)),
                           make_rng(5 ^ i))
        assert full.nodes[0] == s
    table.to_json(tmp_path / "t.json")
    assert json.loads((tmp_path / "t.json").read_text())["starts"] == table.starts.tolist()
    vsa = run_trials(barbell_small, TrialConfig("VSA-I", budget_fraction=0.01, runs=2), "ccdf")
    assert vsa.starts.tolist() == [-1, -1]
