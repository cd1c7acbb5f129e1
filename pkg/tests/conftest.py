import numpy as np
import pytest

from twolayer.generators import PRESETS, generate_two_layer
from twolayer.graph import TwoLayerNetwork, build_bipartite, build_graph


def random_graph(n, p, rng):
    iu = np.triu_indices(n, 1)
    keep = rng.random(len(iu[0])) < p
    return build_graph(np.column_stack((iu[0][keep], iu[1][keep])), n)


def random_net(n_u, n_v, rng, p=0.3, extra=None, covered=True):
    """Random two-layer fixture; ``covered`` gives every node on both sides a bridge edge."""
    pairs = []
    if covered:
        pairs += [(u, int(rng.integers(n_v))) for u in range(n_u)]
        pairs += [(int(rng.integers(n_u)), v) for v in range(n_v)]
    extra = n_u if extra is None else extra
    pairs += [(int(rng.integers(n_u)), int(rng.integers(n_v))) for _ in range(extra)]
    return TwoLayerNetwork(random_graph(n_u, p, rng), random_graph(n_v, p, rng),
                           build_bipartite(pairs, n_u, n_v))


def connected_random_net(n_u, n_v, rng, p=0.4):
    """Covered fixture whose target and auxiliary graphs are connected (a path is added)."""
    net = random_net(n_u, n_v, rng, p)
    ring_u = np.column_stack((np.arange(n_u - 1), np.arange(1, n_u)))
    ring_v = np.column_stack((np.arange(n_v - 1), np.arange(1, n_v)))
    target = build_graph(np.vstack((net.target.edges(), ring_u)), n_u)
    aux = build_graph(np.vstack((net.auxiliary.edges(), ring_v)), n_v)
    return TwoLayerNetwork(target, aux, net.bridge)


def matching_net(g):
    """Two-layer network whose auxiliary graph is ``g`` itself, bridged by the identity."""
    n = g.node_count
    ident = np.column_stack((np.arange(n), np.arange(n)))
    return TwoLayerNetwork(g, g, build_bipartite(ident, n, n))


@pytest.fixture
def triangle():
    return build_graph([(0, 1), (1, 2), (0, 2)], 3)


@pytest.fixture
def path3():
    return build_graph([(0, 1), (1, 2)], 3)


@pytest.fixture
def vsa_fixture():
    """U={u0,u1}, V={v0,v1}, bridge (u0,v0),(u0,v1),(u1,v1); b = (1.5, 0.5)."""
    target = build_graph([(0, 1)], 2)
    aux = build_graph([(0, 1)], 2)
    return TwoLayerNetwork(target, aux, build_bipartite([(0, 0), (0, 1), (1, 1)], 2, 2))


@pytest.fixture(scope="session")
def barbell_small():
    return generate_two_layer(PRESETS["barbell-small"])


# -- acceptance reporting -----------------------------------------------------------

_VERDICTS = []


@pytest.fixture
def verdict():
    """Record and print one ``PASS``/``FAIL`` line for an acceptance criterion."""
    def record(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        _VERDICTS.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_VERDICTS, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
