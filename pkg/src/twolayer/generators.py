"""Seeded synthetic benchmarks: Barabasi-Albert graphs, the barbell target
graph and the random bipartite wiring between target and auxiliary nodes."""

from dataclasses import asdict, dataclass

import numpy as np

from . import _kernels
from .errors import ParameterError
from .graph import INDEX_DTYPE, TwoLayerNetwork, build_bipartite, build_graph
from .rng import make_rng


@dataclass(frozen=True)
class SyntheticSpec:
    """Configuration of the three-BA-graph benchmark.

    The target graph joins ``BA(n, ba_m_target_1)`` and ``BA(n, ba_m_target_2)``
    by one edge, the auxiliary graph is ``BA(n, ba_m_aux)``. Mean degrees
    4/10/20 correspond to ``m`` = 2/5/10.
    """

    n_per_part: int = 500
    ba_m_target_1: int = 2
    ba_m_target_2: int = 10
    ba_m_aux: int = 5
    extra_pairs: int = 1000
    seed: int = 0

    def __post_init__(self):
        for name in ("ba_m_target_1", "ba_m_target_2", "ba_m_aux"):
            m = getattr(self, name)
            if not 1 <= m < self.n_per_part:
                raise ParameterError(f"{name}={m} must satisfy 1 <= m < n_per_part={self.n_per_part}")
        if self.extra_pairs < 0:
            raise ParameterError("extra_pairs must be >= 0")

    def to_dict(self):
        return asdict(self)


PRESETS = {
    "barbell-small": SyntheticSpec(n_per_part=500, extra_pairs=1000),
    "barbell-paper": SyntheticSpec(n_per_part=100_000, extra_pairs=200_000),
}


def generate_ba(n, m, seed):
    """Barabasi-Albert graph on ``n`` nodes, ``m`` edges per new node.

    Starts from a complete graph on ``m + 1`` nodes; later nodes pick ``m``
    distinct targets with probability proportional to degree.
    """
    n, m = int(n), int(m)
    if m < 1 or n <= m:
        raise ParameterError(f"Barabasi-Albert needs n > m >= 1, got n={n}, m={m}")
    rng = make_rng(seed)
    return build_graph(_kernels.ba_edges(n, m, rng), n)


def build_barbell_target(g1, g2, rng):
    """Disjoint union of ``g1`` and ``g2`` (``g2`` offset by ``|g1|``) plus one
    connector edge between uniformly chosen endpoints."""
    if g1.node_count == 0 or g2.node_count == 0:
        raise ParameterError("both barbell parts must be nonempty")
    rng = make_rng(rng)
    n1 = g1.node_count
    a = int(rng.integers(n1))
    b = n1 + int(rng.integers(g2.node_count))
    edges = np.concatenate((g1.edges(), g2.edges() + n1, np.array([[a, b]], dtype=INDEX_DTYPE)))
    return build_graph(edges, n1 + g2.node_count)


def wire_bipartite(n_u, n_v, extra_pairs, rng):
    """Bridge where every U-node gets one uniform V-neighbor, then
    ``extra_pairs`` further distinct pairs drawn uniformly.

    Extra pairs that collide with existing edges are re-drawn, so the result
    has exactly ``n_u + extra_pairs`` edges.
    """
    n_u, n_v, extra_pairs = int(n_u), int(n_v), int(extra_pairs)
    if n_u < 1 or n_v < 1:
        raise ParameterError("wire_bipartite needs n_u, n_v >= 1")
    if extra_pairs < 0 or extra_pairs > n_u * n_v - n_u:
        raise ParameterError(
            f"extra_pairs={extra_pairs} infeasible: at most {n_u * n_v - n_u} free pairs")
    rng = make_rng(rng)
    first = rng.integers(n_v, size=n_u)
    keys = np.arange(n_u, dtype=INDEX_DTYPE) * n_v + first
    taken = set(keys.tolist())
    extra = []
    while len(extra) < extra_pairs:
        need = extra_pairs - len(extra)
        cand = rng.integers(n_u * n_v, size=need)
        for k in cand.tolist():
            if k not in taken:
                taken.add(k)
                extra.append(k)
    keys = np.concatenate((keys, np.asarray(extra, dtype=INDEX_DTYPE)))
    return build_bipartite(np.column_stack((keys // n_v, keys % n_v)), n_u, n_v)


def generate_two_layer(spec):
    """Full synthetic network for a :class:`SyntheticSpec`.

    Each component draws from its own child stream of ``spec.seed`` so that
    changing one part's parameters leaves the others untouched.
    """
    seeds = np.random.SeedSequence(spec.seed).generate_state(5, dtype=np.uint64)
    n = spec.n_per_part
    g1 = generate_ba(n, spec.ba_m_target_1, seeds[0])
    g2 = generate_ba(n, spec.ba_m_target_2, seeds[1])
    aux = generate_ba(n, spec.ba_m_aux, seeds[2])
    target = build_barbell_target(g1, g2, make_rng(seeds[3]))
    bridge = wire_bipartite(target.node_count, aux.node_count, spec.extra_pairs, make_rng(seeds[4]))
    return TwoLayerNetwork(target, aux, bridge)
