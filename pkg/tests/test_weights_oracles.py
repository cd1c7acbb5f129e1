import numpy as np
import pytest

from conftest import matching_net, random_net
from twolayer.errors import NumericalError, ParameterError
from twolayer.graph import TwoLayerNetwork, build_bipartite, build_graph
from twolayer.oracles import (MAX_STATES, build_modified_transition_matrix,
                              detailed_balance_violation, power_iteration, rwtvsa_stationary,
                              rwwj_transition_matrix, stationary_distribution, total_variation)
from twolayer.weights import (compute_rwtrwa_weights, default_desired_weights,
                              fixed_point_residuals, iterate_fixed_point_weights,
                              solve_fixed_point_weights)


def scalar_weights(net, alpha, beta, w_u):
    """Loop-by-loop evaluation of the weight relations (independent of the vector code)."""
    g, a, b = net.target, net.auxiliary, net.bridge
    pi_u = [(g.degree(u) + w_u[u]) / (2 * g.edge_count + alpha) for u in range(g.node_count)]
    w_v = [beta * sum(pi_u[u] / b.u_degrees[u] for u in b.v_neighbors(v).tolist())
           for v in range(a.node_count)]
    z_v = 2 * a.edge_count + sum(w_v)
    pi_v = [(a.degree(v) + w_v[v]) / z_v for v in range(a.node_count)]
    prop = [alpha * sum(pi_v[v] / b.v_degrees[v] for v in b.u_neighbors(u).tolist())
            for u in range(g.node_count)]
    return np.array(w_v), np.array(prop), np.array(pi_u), np.array(pi_v)


@pytest.mark.parametrize("seed", range(6))
def test_rwtrwa_weights_two_ways(seed):
    rng = np.random.default_rng(seed)
    net = random_net(7, 6, rng, covered=seed % 2 == 0)
    alpha, beta = 1.0 + seed, 2.0
    if not (net.bridge.u_degrees > 0).any():
        pytest.skip("no covered node")
    desired = default_desired_weights(net, alpha)
    rw = compute_rwtrwa_weights(net, alpha, beta, desired)
    w_v, prop, pi_u, pi_v = scalar_weights(net, alpha, beta, desired)
    assert np.allclose(rw.wV, w_v, rtol=0, atol=1e-12)
    assert np.allclose(rw.proposal_wU, prop, rtol=0, atol=1e-12)
    assert np.allclose(rw.piU, pi_u, atol=1e-15) and np.allclose(rw.piV, pi_v, atol=1e-15)
    assert rw.piU.sum() == pytest.approx(1.0, abs=1e-12)
    assert rw.piV.sum() == pytest.approx(1.0, abs=1e-12)


def test_rwtrwa_weights_matching_bridge():
    g = build_graph([(0, 1), (1, 2), (2, 3)], 4)
    net = matching_net(g)
    alpha, beta = 2.0, 3.0
    rw = compute_rwtrwa_weights(net, alpha, beta, np.full(4, alpha / 4))
    expected = beta * (g.degrees + alpha / 4) / (2 * g.edge_count + alpha)
    assert np.allclose(rw.wV, expected, atol=1e-15)


def test_rwtrwa_weights_validation(vsa_fixture):
    with pytest.raises(ParameterError):
        compute_rwtrwa_weights(vsa_fixture, 1.0, 1.0, [0.7, 0.7])
    lonely = TwoLayerNetwork(build_graph([(0, 1)], 2), build_graph([], 1), build_bipartite([(0, 0)], 2, 1))
    with pytest.raises(ParameterError):
        compute_rwtrwa_weights(lonely, 1.0, 1.0, [0.5, 0.5])
    assert default_desired_weights(lonely, 1.0).tolist() == [1.0, 0.0]


@pytest.mark.parametrize("seed", range(8))
def test_fixed_point_closed_form(seed):
    rng = np.random.default_rng(100 + seed)
    net = random_net(int(rng.integers(3, 20)), int(rng.integers(3, 20)), rng)
    alpha, beta = float(rng.uniform(0.1, 20)), float(rng.uniform(0.1, 20))
    w_u, w_v = solve_fixed_point_weights(net, alpha, beta)
    assert max(fixed_point_residuals(net, alpha, beta, w_u, w_v)) <= 1e-10
    it_u, it_v = iterate_fixed_point_weights(net, alpha, beta)
    assert np.allclose(w_u, it_u, rtol=1e-8, atol=1e-10)
    assert np.allclose(w_v, it_v, rtol=1e-8, atol=1e-10)
    # the fixed point's target weights sum to alpha
    assert w_u.sum() == pytest.approx(alpha, rel=1e-10)


def test_fixed_point_scaling():
    rng = np.random.default_rng(7)
    net = random_net(10, 8, rng)
    for t in (1.0, 2.0):
        w_u, w_v = solve_fixed_point_weights(net, 3.0 * t, 5.0 * t)
        it_u, it_v = iterate_fixed_point_weights(net, 3.0 * t, 5.0 * t)
        assert np.allclose(w_u, it_u, atol=1e-10) and np.allclose(w_v, it_v, atol=1e-10)
        assert w_v.sum() == pytest.approx(5.0 * t, rel=1e-10)


def test_fixed_point_matching_symmetric():
    g = build_graph([(0, 1), (1, 2), (2, 0)], 3)
    w_u, w_v = solve_fixed_point_weights(matching_net(g), 2.0, 2.0)
    assert np.allclose(w_u, 2 / 3) and np.allclose(w_v, 2 / 3)


def test_fixed_point_errors(vsa_fixture):
    lonely = TwoLayerNetwork(build_graph([(0, 1)], 2), build_graph([], 1), build_bipartite([(0, 0)], 2, 1))
    with pytest.raises(ParameterError):
        solve_fixed_point_weights(lonely, 1.0, 1.0)
    edgeless = TwoLayerNetwork(build_graph([], 2), build_graph([], 2),
                               build_bipartite([(0, 0), (1, 1)], 2, 2))
    with pytest.raises(NumericalError) as info:
        solve_fixed_point_weights(edgeless, 1.0, 1.0)
    assert info.value.condition is not None


def test_large_system_uses_sparse_solver():
    rng = np.random.default_rng(3)
    n = 2500
    pairs = np.column_stack((np.arange(n), rng.integers(n, size=n)))
    pairs = np.vstack((pairs, np.column_stack((rng.integers(n, size=n), np.arange(n)))))
    ring = np.column_stack((np.arange(n - 1), np.arange(1, n)))
    net = TwoLayerNetwork(build_graph(ring, n), build_graph(ring, n), build_bipartite(pairs, n, n))
    w_u, w_v = solve_fixed_point_weights(net, 10.0, 10.0)
    assert max(fixed_point_residuals(net, 10.0, 10.0, w_u, w_v)) <= 1e-10


# -- transition-matrix oracles ---------------------------------------------------------------


@pytest.mark.parametrize("alpha", [0.1, 1.0, 10.0])
def test_modified_matrix_rows_and_balance(alpha):
    rng = np.random.default_rng(int(alpha * 10))
    net = random_net(12, 9, rng, covered=False)
    a = rng.uniform(0.2, 2.0, size=9)
    P = build_modified_transition_matrix(net, alpha, a)
    assert np.abs(P.sum(axis=1) - 1).max() <= 1e-12
    pi = rwtvsa_stationary(net, alpha, a)
    assert detailed_balance_violation(P, pi) <= 1e-12


def test_power_iteration_matches_stationary():
    net = random_net(10, 7, np.random.default_rng(11), p=0.4)
    P = build_modified_transition_matrix(net, 1.0, np.ones(7))
    pi = rwtvsa_stationary(net, 1.0, np.ones(7))
    isolated = (net.target.degrees == 0) & (net.bridge.u_degrees == 0)
    if isolated.any():
        pytest.skip("fixture has an unreachable node")
    assert np.abs(power_iteration(P) - pi).max() <= 1e-8
    assert np.abs(stationary_distribution(P) - pi).max() <= 1e-8


def test_jumper_row_is_b_law(vsa_fixture):
    P = build_modified_transition_matrix(vsa_fixture, 2.0, np.ones(2))
    assert P[2, :2].tolist() == [0.75, 0.25]
    assert P[0, 2] == pytest.approx(3 / 4)
    assert P[1, 2] == pytest.approx(1 / 2)


def test_matching_rwt_vsa_equals_rwwj():
    g = build_graph([(0, 1), (1, 2), (3, 4), (4, 5), (5, 3)], 7)
    alpha = 1.3
    pi_rwt = stationary_distribution(build_modified_transition_matrix(matching_net(g), alpha, np.ones(7)))
    pi_rwwj = stationary_distribution(rwwj_transition_matrix(g, alpha))
    assert total_variation(pi_rwt[:-1] / pi_rwt[:-1].sum(), pi_rwwj) <= 1e-8


def test_size_guard():
    g = build_graph([], MAX_STATES + 1)
    with pytest.raises(ParameterError):
        rwwj_transition_matrix(g, 1.0)
