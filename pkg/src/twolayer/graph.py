"""Immutable CSR graphs and the two-layered network container.

Node ids are dense integers ``0..n-1`` on every side. Adjacency is stored as
``indptr``/``indices`` int64 arrays (compressed sparse rows), neighbor lists
sorted ascending. Arrays are flagged read-only after construction.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, StructureError

INDEX_DTYPE = np.int64


def _freeze(arr):
    arr.flags.writeable = False
    return arr


def _csr(src, dst, n):
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=INDEX_DTYPE)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return indptr, np.ascontiguousarray(dst, dtype=INDEX_DTYPE)


def _as_pairs(edges):
    if not isinstance(edges, np.ndarray):
        edges = list(edges)
    if len(edges) == 0:
        return np.empty((0, 2), dtype=INDEX_DTYPE)
    return np.asarray(edges, dtype=INDEX_DTYPE).reshape(-1, 2)


class Graph:
    """Simple undirected graph in CSR form.

    Use :func:`build_graph` to construct one from an edge list; the constructor
    trusts its arguments.
    """

    __slots__ = ("node_count", "indptr", "indices", "edge_count", "degrees")

    def __init__(self, node_count, indptr, indices):
        self.node_count = int(node_count)
        self.indptr = _freeze(np.asarray(indptr, dtype=INDEX_DTYPE))
        self.indices = _freeze(np.asarray(indices, dtype=INDEX_DTYPE))
        self.edge_count = len(self.indices) // 2
        self.degrees = _freeze(np.diff(self.indptr))

    def degree(self, u):
        return int(self.indptr[u + 1] - self.indptr[u])

    def neighbors(self, u):
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def edges(self):
        """Each undirected edge once, as an ``(m, 2)`` array with ``u < v``."""
        src = np.repeat(np.arange(self.node_count, dtype=INDEX_DTYPE), self.degrees)
        keep = src < self.indices
        return np.column_stack((src[keep], self.indices[keep]))

    def __len__(self):
        return self.node_count

    def __repr__(self):
        return f"Graph(node_count={self.node_count}, edge_count={self.edge_count})"

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.node_count == other.node_count
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    def __getstate__(self):
        return (self.node_count, np.array(self.indptr), np.array(self.indices))

    def __setstate__(self, state):
        self.__init__(*state)


def build_graph(edges, node_count):
    """Build a :class:`Graph` from unordered id pairs.

    Duplicate pairs (in either orientation) collapse to one edge and
    self-loops are dropped.

    Raises
    ------
    ParameterError
        If an id is negative or not below ``node_count``.
    """
    node_count = int(node_count)
    if node_count < 0:
        raise ParameterError(f"node_count must be >= 0, got {node_count}")
    pairs = _as_pairs(edges)
    bad = (pairs < 0) | (pairs >= node_count)
    if bad.any():
        row = int(np.flatnonzero(bad.any(axis=1))[0])
        raise ParameterError(
            f"edge ({pairs[row, 0]}, {pairs[row, 1]}) out of range for "
            f"node_count={node_count}")
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    if len(lo):
        key = np.unique(lo * node_count + hi)
        lo, hi = key // node_count, key % node_count
    indptr, indices = _csr(np.concatenate((lo, hi)), np.concatenate((hi, lo)), node_count)
    return Graph(node_count, indptr, indices)


def empty_graph(node_count):
    return build_graph(np.empty((0, 2), dtype=INDEX_DTYPE), node_count)


class BipartiteGraph:
    """Bridge between target nodes ``U`` and auxiliary nodes ``V``.

    ``u_indptr/u_indices`` list the V-neighbors of every U-node,
    ``v_indptr/v_indices`` the U-neighbors of every V-node.
    """

    __slots__ = ("u_count", "v_count", "u_indptr", "u_indices", "v_indptr",
                 "v_indices", "edge_count", "u_degrees", "v_degrees")

    def __init__(self, u_count, v_count, u_indptr, u_indices, v_indptr, v_indices):
        self.u_count = int(u_count)
        self.v_count = int(v_count)
        self.u_indptr = _freeze(np.asarray(u_indptr, dtype=INDEX_DTYPE))
        self.u_indices = _freeze(np.asarray(u_indices, dtype=INDEX_DTYPE))
        self.v_indptr = _freeze(np.asarray(v_indptr, dtype=INDEX_DTYPE))
        self.v_indices = _freeze(np.asarray(v_indices, dtype=INDEX_DTYPE))
        self.edge_count = len(self.u_indices)
        self.u_degrees = _freeze(np.diff(self.u_indptr))
        self.v_degrees = _freeze(np.diff(self.v_indptr))

    def u_neighbors(self, u):
        return self.u_indices[self.u_indptr[u]:self.u_indptr[u + 1]]

    def v_neighbors(self, v):
        return self.v_indices[self.v_indptr[v]:self.v_indptr[v + 1]]

    def edges(self):
        """All ``(u, v)`` pairs sorted by ``u`` then ``v``."""
        src = np.repeat(np.arange(self.u_count, dtype=INDEX_DTYPE), self.u_degrees)
        return np.column_stack((src, self.u_indices))

    def dense_adjacency(self):
        """``A`` with ``A[u, v] = 1`` for bridge edges; for small instances."""
        a = np.zeros((self.u_count, self.v_count))
        e = self.edges()
        a[e[:, 0], e[:, 1]] = 1.0
        return a

    def __repr__(self):
        return (f"BipartiteGraph(u_count={self.u_count}, v_count={self.v_count}, "
                f"edge_count={self.edge_count})")

    def __eq__(self, other):
        if not isinstance(other, BipartiteGraph):
            return NotImplemented
        return (self.u_count == other.u_count and self.v_count == other.v_count
                and np.array_equal(self.u_indptr, other.u_indptr)
                and np.array_equal(self.u_indices, other.u_indices))

    def __getstate__(self):
        return (self.u_count, self.v_count, np.array(self.u_indptr),
                np.array(self.u_indices), np.array(self.v_indptr),
                np.array(self.v_indices))

    def __setstate__(self, state):
        self.__init__(*state)


def build_bipartite(pairs, u_count, v_count):
    """Build a :class:`BipartiteGraph` from ``(u, v)`` pairs, dropping duplicates."""
    u_count, v_count = int(u_count), int(v_count)
    arr = _as_pairs(pairs)
    bad = (arr[:, 0] < 0) | (arr[:, 0] >= u_count) | (arr[:, 1] < 0) | (arr[:, 1] >= v_count)
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        raise ParameterError(
            f"bridge pair ({arr[row, 0]}, {arr[row, 1]}) out of range for "
            f"u_count={u_count}, v_count={v_count}")
    if len(arr):
        key = np.unique(arr[:, 0] * v_count + arr[:, 1])
        us, vs = key // v_count, key % v_count
    else:
        us = vs = np.empty(0, dtype=INDEX_DTYPE)
    u_indptr, u_indices = _csr(us, vs, u_count)
    v_indptr, v_indices = _csr(vs, us, v_count)
    return BipartiteGraph(u_count, v_count, u_indptr, u_indices, v_indptr, v_indices)


@dataclass(frozen=True)
class TwoLayerNetwork:
    """Target graph ``G``, auxiliary graph ``G'`` and the bridge ``G_b``."""

    target: Graph
    auxiliary: Graph
    bridge: BipartiteGraph

    def __post_init__(self):
        if self.bridge.u_count != self.target.node_count:
            raise StructureError(
                f"bridge has {self.bridge.u_count} U-nodes but target has "
                f"{self.target.node_count}")
        if self.bridge.v_count != self.auxiliary.node_count:
            raise StructureError(
                f"bridge has {self.bridge.v_count} V-nodes but auxiliary has "
                f"{self.auxiliary.node_count}")


@dataclass(frozen=True)
class ValidationReport:
    uncovered_u: int
    uncovered_v: int
    isolated_target: int
    isolated_auxiliary: int

    @property
    def fully_covered(self):
        """True when every target node has a bridge edge (VS-A applicable)."""
        return self.uncovered_u == 0


def check_graph(g):
    """Full scan of the :class:`Graph` invariants; raises :class:`StructureError`."""
    n = g.node_count
    if len(g.indptr) != n + 1 or g.indptr[0] != 0 or g.indptr[-1] != len(g.indices):
        raise StructureError("malformed indptr")
    if np.any(np.diff(g.indptr) < 0):
        raise StructureError("indptr not monotone")
    if len(g.indices) and (g.indices.min() < 0 or g.indices.max() >= n):
        raise StructureError("neighbor id out of range")
    src = np.repeat(np.arange(n, dtype=INDEX_DTYPE), g.degrees)
    if np.any(src == g.indices):
        raise StructureError("self-loop present")
    key = src * max(n, 1) + g.indices
    if np.any(np.diff(key) <= 0):
        raise StructureError("adjacency not strictly sorted (duplicate edge?)")
    rev = np.sort(g.indices * max(n, 1) + src)
    if not np.array_equal(rev, key):
        raise StructureError("adjacency not symmetric")
    if int(g.degrees.sum()) != 2 * g.edge_count:
        raise StructureError("handshake identity violated")


def validate_two_layer(net):
    """Check bridge cross-consistency and count uncovered / isolated nodes."""
    b = net.bridge
    fwd = b.edges()
    src_v = np.repeat(np.arange(b.v_count, dtype=INDEX_DTYPE), b.v_degrees)
    back = np.column_stack((b.v_indices, src_v))
    if len(fwd) != len(back):
        raise StructureError("bridge adjacency sides disagree in size")
    if len(back):
        order = np.lexsort((back[:, 1], back[:, 0]))
        if not np.array_equal(fwd, back[order]):
            raise StructureError("bridge adjacency is not cross-consistent")
    return ValidationReport(
        uncovered_u=int(np.count_nonzero(b.u_degrees == 0)),
        uncovered_v=int(np.count_nonzero(b.v_degrees == 0)),
        isolated_target=int(np.count_nonzero(net.target.degrees == 0)),
        isolated_auxiliary=int(np.count_nonzero(net.auxiliary.degrees == 0)),
    )
