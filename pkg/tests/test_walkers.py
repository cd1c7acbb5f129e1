import numpy as np
import pytest

from conftest import connected_random_net, matching_net, random_net
from twolayer.errors import ParameterError, StructureError
from twolayer.graph import TwoLayerNetwork, build_bipartite, build_graph
from twolayer.oracles import (rwtvsa_stationary, rwwj_transition_matrix, stationary_distribution,
                              total_variation)
from twolayer.rng import make_rng
from twolayer.vertex_samplers import UniformSampler, WeightedSampler
from twolayer.walkers import (SamplePath, VsaIISampleGroup, compute_wu_rwtvsa, groups_to_path,
                              rwt_rwa_walk, rwt_vsa_walk, rwtvsa_weights, rwwj, simple_rw,
                              vsa1_sample, vsa2_sample, vsa_b_weights)
from twolayer.weights import default_desired_weights


def visit_law(nodes, n):
    return np.bincount(nodes, minlength=n) / len(nodes)


class NoTableSampler:
    """Sampler exposing only ``draw`` so walkers take the generic path."""

    def __init__(self, inner):
        self.inner = inner

    def draw(self, rng):
        return self.inner.draw(rng)


# -- simple walk and RWwJ ---------------------------------------------------------


def test_simple_rw_triangle_uniform(triangle):
    path = simple_rw(triangle, 0, 300_000, make_rng(0))
    assert len(path) == 300_000 and not path.jumped.any()
    assert np.allclose(visit_law(path.nodes, 3), 1 / 3, atol=0.005)
    assert np.all(path.denom == 2)


def test_simple_rw_path_degree_law(path3):
    path = simple_rw(path3, 1, 400_000, make_rng(1))
    assert np.allclose(visit_law(path.nodes, 3), [0.25, 0.5, 0.25], atol=0.005)
    steps = np.column_stack((path.nodes[:-1], path.nodes[1:]))
    assert np.all(np.abs(steps[:, 0] - steps[:, 1]) == 1)


def test_simple_rw_isolated_start():
    g = build_graph([(0, 1)], 3)
    with pytest.raises(StructureError):
        simple_rw(g, 2, 10, make_rng(0))


def test_budget_validation(triangle):
    with pytest.raises(ParameterError):
        simple_rw(triangle, 0, 0, make_rng(0))


def test_simple_rw_barbell_trap(barbell_small):
    g = barbell_small.target
    rng = make_rng(5)
    budget = g.node_count // 100
    other = []
    for _ in range(100):
        start = int(rng.integers(500))
        path = simple_rw(g, start, budget, rng)
        other.append(np.mean(path.nodes >= 500))
    assert np.median(other) == 0.0


def test_rwwj_alpha_zero_matches_simple_rw(path3):
    a = simple_rw(path3, 0, 500, make_rng(3))
    b = rwwj(path3, 0.0, 500, make_rng(3), start=0)
    assert np.array_equal(a.nodes, b.nodes)


def test_rwwj_jump_always_uniform():
    g = build_graph([(0, 1), (1, 2), (2, 3), (1, 3), (3, 4)], 5)
    path = rwwj(g, 1.0, 200_000, make_rng(4), start=0, jump_always=True)
    assert path.jumped[1:].all()
    assert total_variation(visit_law(path.nodes, 5), np.full(5, 0.2)) < 0.01


def test_rwwj_matches_exact_stationary_law():
    g = build_graph([(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (4, 5), (5, 6)], 8)
    alpha = 1.5
    exact = stationary_distribution(rwwj_transition_matrix(g, alpha))
    assert np.allclose(exact, (g.degrees + alpha) / (g.degrees + alpha).sum(), atol=1e-12)
    path = rwwj(g, alpha, 1_000_000, make_rng(6), start=0)
    assert total_variation(visit_law(path.nodes, 8), exact) < 0.01
    assert np.array_equal(path.denom, g.degrees[path.nodes] + alpha)


# -- VS-A-I / VS-A-II ----------------------------------------------------------------


def test_vsa1_fixture_law(vsa_fixture):
    assert vsa_b_weights(vsa_fixture, np.ones(2)).tolist() == [1.5, 0.5]
    draws = vsa1_sample(vsa_fixture, UniformSampler(2), 100_000, make_rng(0))
    p = np.mean(draws == 0)
    assert abs(p - 0.75) < 3 * np.sqrt(0.75 * 0.25 / 100_000)


def test_vsa1_generic_sampler_path_same_law(vsa_fixture):
    draws = vsa1_sample(vsa_fixture, NoTableSampler(UniformSampler(2)), 20_000, make_rng(1))
    assert abs(np.mean(draws == 0) - 0.75) < 3 * np.sqrt(0.75 * 0.25 / 20_000)


def test_vsa1_matching_bridge_uniform(triangle):
    draws = vsa1_sample(matching_net(triangle), UniformSampler(3), 60_000, make_rng(2))
    assert np.allclose(visit_law(draws, 3), 1 / 3, atol=0.01)


def test_vsa1_skips_uncovered_v():
    net = TwoLayerNetwork(build_graph([], 2), build_graph([], 3),
                          build_bipartite([(0, 0), (1, 0)], 2, 3))
    draws = vsa1_sample(net, UniformSampler(3), 1000, make_rng(3))
    assert set(draws.tolist()) <= {0, 1}
    draws = vsa1_sample(net, NoTableSampler(UniformSampler(3)), 100, make_rng(3))
    assert len(draws) == 100


def test_vsa1_no_covered_node_errors():
    net = TwoLayerNetwork(build_graph([], 2), build_graph([], 2), build_bipartite([], 2, 2))
    with pytest.raises(StructureError):
        vsa1_sample(net, UniformSampler(2), 10, make_rng(0))
    with pytest.raises(StructureError):
        vsa1_sample(net, NoTableSampler(UniformSampler(2)), 10, make_rng(0), max_retries=50)
    with pytest.raises(StructureError):
        vsa2_sample(net, UniformSampler(2), 10, make_rng(0), max_retries=50)


def test_vsa2_matching_groups(triangle):
    groups = vsa2_sample(matching_net(triangle), UniformSampler(3), 50, make_rng(0))
    assert sum(len(g.members) for g in groups) == 50
    assert all(len(g.members) == 1 and g.d_u_b.tolist() == [1] for g in groups)


def test_vsa2_star_bridge():
    n = 6
    star = build_bipartite([(u, 0) for u in range(n)], n, 1)
    net = TwoLayerNetwork(build_graph([], n), build_graph([], 1), star)
    groups = vsa2_sample(net, UniformSampler(1), n, make_rng(0))
    assert len(groups) == 1 and groups[0].members.tolist() == list(range(n))


def test_vsa2_mean_group_size(barbell_small):
    b = barbell_small.bridge
    rng = make_rng(1)
    groups = []
    while len(groups) < 10_000:
        groups += vsa2_sample(barbell_small, UniformSampler(b.v_count), 1, rng)
    expected = b.edge_count / np.count_nonzero(b.v_degrees)
    mean = np.mean([len(g.members) for g in groups[:10_000]])
    assert abs(mean - expected) / expected < 0.05


def test_vsa2_records_sampler_weight():
    net = TwoLayerNetwork(build_graph([], 2), build_graph([], 2),
                          build_bipartite([(0, 0), (1, 1)], 2, 2))
    groups = vsa2_sample(net, WeightedSampler([1.0, 3.0]), 20, make_rng(0))
    for g in groups:
        assert g.a_v == [1.0, 3.0][g.v]


def test_groups_to_path_denominators():
    groups = [VsaIISampleGroup(0, 2.0, np.array([1, 2]), np.array([1, 3]))]
    path = groups_to_path(groups)
    assert path.nodes.tolist() == [1, 2] and path.denom.tolist() == [2.0, 6.0]
    with pytest.raises(ParameterError):
        VsaIISampleGroup(0, 1.0, np.array([], dtype=np.int64), np.array([], dtype=np.int64))


# -- RWT-VSA ---------------------------------------------------------------------------


def test_compute_wu_examples(vsa_fixture, triangle):
    assert compute_wu_rwtvsa(vsa_fixture, 2.0, 0, np.ones(2)) == 3.0
    assert compute_wu_rwtvsa(vsa_fixture, 2.0, 1, np.ones(2)) == 1.0
    assert compute_wu_rwtvsa(matching_net(triangle), 0.7, 1, np.ones(3)) == 0.7
    lonely = TwoLayerNetwork(build_graph([], 2), build_graph([], 1), build_bipartite([(0, 0)], 2, 1))
    assert compute_wu_rwtvsa(lonely, 5.0, 1, np.ones(1)) == 0.0
    assert rwtvsa_weights(vsa_fixture, 2.0, np.ones(2)).tolist() == [3.0, 1.0]


def test_compute_wu_missing_weight(vsa_fixture):
    with pytest.raises(ParameterError, match="v=1"):
        compute_wu_rwtvsa(vsa_fixture, 1.0, 0, {0: 1.0})


def test_rwt_vsa_alpha_zero_is_simple_rw():
    net = connected_random_net(8, 5, np.random.default_rng(1))
    a = simple_rw(net.target, 0, 1000, make_rng(2))
    b = rwt_vsa_walk(net, 0.0, UniformSampler(5), 0, 1000, make_rng(2))
    assert np.array_equal(a.nodes, b.nodes) and np.array_equal(a.denom, b.denom)


def test_rwt_vsa_needs_weight_table(vsa_fixture):
    with pytest.raises(ParameterError):
        rwt_vsa_walk(vsa_fixture, 1.0, NoTableSampler(UniformSampler(2)), 0, 10, make_rng(0))


def test_rwt_vsa_matching_bridge_is_rwwj():
    g = build_graph([(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (6, 7)], 8)
    alpha = 2.0
    path = rwt_vsa_walk(matching_net(g), alpha, UniformSampler(8), 0, 1_000_000, make_rng(3))
    target = (g.degrees + alpha) / (g.degrees + alpha).sum()
    assert total_variation(visit_law(path.nodes, 8), target) < 0.01


def test_rwt_vsa_stationary_law_on_fixture():
    net = random_net(8, 6, np.random.default_rng(4), p=0.3)
    a = np.array([1.0, 2.0, 0.5, 1.0, 3.0, 1.0])
    alpha = 1.0
    path = rwt_vsa_walk(net, alpha, WeightedSampler(a), None, 1_000_000, make_rng(5))
    pi = rwtvsa_stationary(net, alpha, a)[:-1]
    assert total_variation(visit_law(path.nodes, 8), pi / pi.sum()) < 0.01
    w = rwtvsa_weights(net, alpha, a)
    assert np.allclose(path.denom, net.target.degrees[path.nodes] + w[path.nodes])


def test_rwt_vsa_jump_destination_law(vsa_fixture):
    # the fixture target graph is one edge, so jumps are visible as flags
    path = rwt_vsa_walk(vsa_fixture, 50.0, UniformSampler(2), 0, 200_000, make_rng(6))
    landed = path.nodes[path.jumped]
    assert abs(np.mean(landed == 0) - 0.75) < 0.01


def test_rwt_vsa_bad_start():
    net = TwoLayerNetwork(build_graph([(0, 1)], 3), build_graph([], 1),
                          build_bipartite([(0, 0)], 3, 1))
    with pytest.raises(StructureError):
        rwt_vsa_walk(net, 1.0, UniformSampler(1), 2, 10, make_rng(0))


# -- RWT-RWA ------------------------------------------------------------------------------


def test_rwt_rwa_alpha_zero_is_plain_walk():
    net = connected_random_net(8, 6, np.random.default_rng(2))
    run = rwt_rwa_walk(net, 0.0, 1.0, None, (0, None, None), 5000, make_rng(1))
    nodes = run.path.nodes
    assert not run.path.jumped.any()
    g = net.target
    for a, b in zip(nodes[:-1].tolist(), nodes[1:].tolist()):
        assert b in g.neighbors(a).tolist()
    assert np.array_equal(run.path.denom, g.degrees[nodes])


def test_rwt_rwa_state_and_lengths():
    net = connected_random_net(6, 5, np.random.default_rng(3))
    run = rwt_rwa_walk(net, 2.0, 2.0, None, None, 777, make_rng(2))
    assert len(run.path) == len(run.y_path) == len(run.mh_path) == 777
    assert run.state.step == 777 and run.state.x == run.path.nodes[-1]
    assert run.state.desired_wU.sum() == pytest.approx(2.0)


def test_rwt_rwa_rejects_bad_desired_weights():
    net = connected_random_net(5, 4, np.random.default_rng(4))
    with pytest.raises(ParameterError):
        rwt_rwa_walk(net, 1.0, 1.0, np.full(5, 0.5), None, 10, make_rng(0))


def test_rwt_rwa_fallback_when_target_node_uncovered():
    # u2 has no bridge edge, so a y-jump from it must fall back to a walk move
    target = build_graph([(0, 1), (1, 2), (2, 0)], 3)
    aux = build_graph([(0, 1)], 2)
    net = TwoLayerNetwork(target, aux, build_bipartite([(0, 0), (1, 1)], 3, 2))
    run = rwt_rwa_walk(net, 1.0, 50.0, default_desired_weights(net, 1.0), (2, 0, 0), 20_000, make_rng(3))
    assert run.fallback.any()
    assert set(run.y_path.tolist()) <= {0, 1}


def test_rwt_rwa_mh_chain_stays_on_positive_weights():
    net = connected_random_net(8, 6, np.random.default_rng(5))
    desired = np.zeros(8)
    desired[[1, 4, 6]] = [0.5, 0.3, 0.2]
    covered = net.bridge.u_degrees > 0
    assert covered[[1, 4, 6]].all()
    run = rwt_rwa_walk(net, 1.0, 1.0, desired, (0, None, 1), 20_000, make_rng(6))
    assert set(run.mh_path.tolist()) <= {1, 4, 6}
    assert set(run.path.nodes[run.path.jumped].tolist()) <= {1, 4, 6}


# -- serialization ----------------------------------------------------------------------


def test_sample_path_csv_round_trip(tmp_path, triangle):
    path = rwwj(triangle, 0.3, 50, make_rng(0), start=1)
    out = tmp_path / "path.csv"
    path.to_csv(out)
    assert out.read_text().splitlines()[0] == "step,node,denom,jumped"
    back = SamplePath.from_csv(out)
    assert np.array_equal(back.nodes, path.nodes)
    assert np.array_equal(back.denom, path.denom)
    assert np.array_equal(back.jumped, path.jumped)


def test_sample_path_rejects_bad_denominators():
    with pytest.raises(ParameterError):
        SamplePath([0, 1], [1.0, 0.0], [False, False])
    with pytest.raises(ParameterError):
        SamplePath([0, 1], [1.0], [False, False])
