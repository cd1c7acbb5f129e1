"""Sampling processes over a two-layered network.

Walk-type samplers return a :class:`SamplePath` whose ``denom`` column holds
each sample's reweighting denominator (``d + w`` for the walks, ``b_u`` for
VS-A-I), so one ratio estimator serves every method.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ParameterError, StructureError
from .graph import INDEX_DTYPE
from .rng import make_rng


@dataclass
class SamplePath:
    nodes: np.ndarray
    denom: np.ndarray
    jumped: np.ndarray

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=INDEX_DTYPE)
        self.denom = np.asarray(self.denom, dtype=float)
        self.jumped = np.asarray(self.jumped, dtype=bool)
        if not len(self.nodes) == len(self.denom) == len(self.jumped):
            raise ParameterError("SamplePath columns differ in length")
        if np.any(~(self.denom > 0)):
            raise ParameterError("SamplePath denominators must be positive")

    def __len__(self):
        return len(self.nodes)

    @property
    def weights(self):
        """Per-sample importance weights ``1 / denom``."""
        return 1.0 / self.denom

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["step", "node", "denom", "jumped"])
            for i, (u, d, j) in enumerate(zip(self.nodes.tolist(), self.denom.tolist(),
                                              self.jumped.tolist())):
                out.writerow([i + 1, u, repr(d), int(j)])

    @classmethod
    def from_csv(cls, path):
        nodes, denom, jumped = [], [], []
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                nodes.append(int(row["node"]))
                denom.append(float(row["denom"]))
                jumped.append(row["jumped"] not in ("0", "False", "false", ""))
        return cls(np.array(nodes, dtype=INDEX_DTYPE), np.array(denom), np.array(jumped, dtype=bool))


@dataclass
class VsaIISampleGroup:
    """All bridge neighbors of one sampled auxiliary node ``v``."""

    v: int
    a_v: float
    members: np.ndarray
    d_u_b: np.ndarray

    def __post_init__(self):
        if len(self.members) == 0:
            raise ParameterError(f"group for v={self.v} has no members")
        if not self.a_v > 0:
            raise ParameterError(f"group for v={self.v} has non-positive a_v")


def groups_to_path(groups):
    """Flatten VS-A-II groups into a path with denominators ``a_v * d_u^(b)``."""
    if not groups:
        raise ParameterError("no groups")
    nodes = np.concatenate([g.members for g in groups])
    denom = np.concatenate([g.a_v * g.d_u_b.astype(float) for g in groups])
    return SamplePath(nodes, denom, np.zeros(len(nodes), dtype=bool))


# -- helpers ---------------------------------------------------------------


def _lookup_table(weights, size):
    """Dense ``a_v`` table from an array, a mapping or a sampler."""
    if hasattr(weights, "weight_table"):
        weights = weights.weight_table()
    if isinstance(weights, dict):
        table = np.full(size, np.nan)
        for v, a in weights.items():
            table[int(v)] = a
        return table
    table = np.asarray(weights, dtype=float)
    if table.shape != (size,):
        raise ParameterError(f"weight table has shape {table.shape}, expected ({size},)")
    return table


def _jump_cdf(net, a):
    """Cumulative ``a_v`` over auxiliary nodes with bridge neighbors.

    Uncovered ``v`` get zero mass; drawing from this table is the same law as
    redrawing whenever an uncovered ``v`` comes up.
    """
    covered = net.bridge.v_degrees > 0
    masked = np.where(covered, a, 0.0)
    if np.any(np.isnan(masked)) or np.any(masked < 0):
        raise ParameterError("weights of covered auxiliary nodes must be known and >= 0")
    positive = np.flatnonzero(masked > 0)
    last = int(positive[-1]) if len(positive) else -1
    return np.cumsum(masked), last


def _resolve_start(start, ok, rng, what):
    if start is None:
        candidates = np.flatnonzero(ok)
        if not len(candidates):
            raise StructureError(f"no valid start node for {what}")
        return int(candidates[int(rng.random() * len(candidates))])
    start = int(start)
    if not ok[start]:
        raise StructureError(f"start node {start} is invalid for {what}")
    return start


def _check_budget(budget):
    budget = int(budget)
    if budget < 1:
        raise ParameterError("budget must be >= 1")
    return budget


# -- walks on the target graph ---------------------------------------------


def simple_rw(g, start, budget, rng):
    """Simple random walk on ``g``; ``denom`` is the node degree."""
    budget = _check_budget(budget)
    rng = make_rng(rng)
    if g.degree(int(start)) < 1:
        raise StructureError(f"start node {start} is isolated")
    w = np.zeros(g.node_count)
    empty = np.zeros(1, dtype=INDEX_DTYPE)
    nodes, jumped = _kernels.walk_indirect(
        g.indptr, g.indices, w, np.zeros(0), -1, empty, empty[:0],
        int(start), budget, False, rng)
    return SamplePath(nodes, g.degrees[nodes].astype(float), jumped)


def rwwj(g, alpha, budget, rng, start=None, jump_always=False):
    """Random walk with uniform jumps (needs uniform node sampling on ``g``).

    At node ``i`` the walker jumps to a uniform node with probability
    ``alpha / (d_i + alpha)``. ``jump_always`` is the ``alpha -> inf`` limit.
    """
    budget = _check_budget(budget)
    rng = make_rng(rng)
    if alpha < 0:
        raise ParameterError("alpha must be >= 0")
    n = g.node_count
    if n == 0:
        raise ParameterError("graph is empty")
    ok = np.ones(n, dtype=bool) if (alpha > 0 or jump_always) else g.degrees > 0
    start = _resolve_start(start, ok, rng, "RWwJ")
    ident = np.arange(n + 1, dtype=INDEX_DTYPE)
    nodes, jumped = _kernels.walk_indirect(
        g.indptr, g.indices, np.full(n, float(alpha)), np.arange(1, n + 1, dtype=float), n - 1,
        ident, ident[:n], start, budget, bool(jump_always), rng)
    denom = np.ones(budget) if jump_always else g.degrees[nodes] + float(alpha)
    return SamplePath(nodes, denom, jumped)


# -- vertex sampling on the auxiliary graph ----------------------------------


def vsa_b_weights(net, weights):
    """``b_u = sum over bridge neighbors v of a_v / d_v^(b)``, for every ``u``."""
    b = net.bridge
    a = _lookup_table(weights, b.v_count)
    e = b.edges()
    per_edge = a[e[:, 1]] / b.v_degrees[e[:, 1]]
    return np.bincount(e[:, 0], weights=per_edge, minlength=b.u_count)


def vsa1_sample(net, sampler, budget, rng, max_retries=100_000):
    """VS-A-I: draw ``v`` from ``sampler``, keep a uniform bridge neighbor of ``v``.

    Returns the sampled target ids. Draws of ``v`` without bridge neighbors
    are skipped; ``max_retries`` consecutive skips raise :class:`StructureError`.
    """
    budget = _check_budget(budget)
    rng = make_rng(rng)
    b = net.bridge
    if hasattr(sampler, "weight_table"):
        cdf, last = _jump_cdf(net, _lookup_table(sampler, b.v_count))
        if last < 0:
            raise StructureError("sampler has no covered auxiliary node")
        return _kernels.vsa1_draws(cdf, last, b.v_indptr, b.v_indices, budget, rng)
    out = np.empty(budget, dtype=INDEX_DTYPE)
    for i in range(budget):
        for _ in range(max_retries):
            v, _a = sampler.draw(rng)
            nb = b.v_neighbors(v)
            if len(nb):
                out[i] = nb[int(rng.random() * len(nb))]
                break
        else:
            raise StructureError(f"{max_retries} consecutive draws hit no covered auxiliary node")
    return out


def vsa2_sample(net, sampler, budget, rng, max_retries=100_000):
    """VS-A-II: keep every bridge neighbor of each sampled ``v``.

    Groups are collected until their total size reaches ``budget``. Each group
    carries the ``a_v`` reported by the sampler at draw time.
    """
    budget = _check_budget(budget)
    rng = make_rng(rng)
    b = net.bridge
    draw_many = getattr(sampler, "draw_many", None)
    groups, total, misses = [], 0, 0
    while total < budget:
        if draw_many is not None:
            vs, avs = draw_many(max(1, budget - total), rng)
            draws = zip(vs.tolist(), avs.tolist())
        else:
            draws = [sampler.draw(rng)]
        for v, a_v in draws:
            members = b.v_neighbors(v)
            if not len(members):
                misses += 1
                if misses >= max_retries:
                    raise StructureError(f"{max_retries} consecutive draws hit no covered auxiliary node")
                continue
            misses = 0
            groups.append(VsaIISampleGroup(int(v), float(a_v), members.copy(),
                                           b.u_degrees[members].copy()))
            total += len(members)
            if total >= budget:
                break
    return groups


# -- random walk with indirect jumps (RWT-VSA) -------------------------------


def compute_wu_rwtvsa(net, alpha, u, weight_lookup):
    """Jump weight of one target node: ``alpha * sum_{v in V_u} a_v / d_v^(b)``."""
    b = net.bridge
    terms = []
    for v in b.u_neighbors(int(u)).tolist():
        try:
            a_v = weight_lookup[v]
        except (KeyError, IndexError):
            raise ParameterError(f"weight a_v unknown for v={v} (neighbor of u={u})") from None
        if a_v is None or (isinstance(a_v, float) and math.isnan(a_v)):
            raise ParameterError(f"weight a_v unknown for v={v} (neighbor of u={u})")
        terms.append(a_v / b.v_degrees[v])
    return alpha * math.fsum(terms)


def rwtvsa_weights(net, alpha, weights):
    """Vectorized :func:`compute_wu_rwtvsa` for every target node."""
    if alpha < 0:
        raise ParameterError("alpha must be >= 0")
    return alpha * vsa_b_weights(net, weights)


def rwt_vsa_walk(net, alpha, sampler, start, budget, rng):
    """Random walk on the target graph with indirect jumps through ``G'``.

    With ``w_u = alpha * b_u`` the walker at ``x`` jumps with probability
    ``w_x / (d_x + w_x)``: it samples ``v`` from ``sampler`` and moves to a
    uniform bridge neighbor of ``v``. ``sampler`` must expose
    ``weight_table()`` since every ``w_u`` needs the ``a_v`` of all of ``u``'s
    bridge neighbors.
    """
    budget = _check_budget(budget)
    rng = make_rng(rng)
    if not hasattr(sampler, "weight_table"):
        raise ParameterError("RWT-VSA needs a sampler with known weights for every auxiliary node")
    g, b = net.target, net.bridge
    a = _lookup_table(sampler, b.v_count)
    w = rwtvsa_weights(net, alpha, a)
    cdf, last = _jump_cdf(net, a)
    start = _resolve_start(start, (g.degrees + w) > 0, rng, "RWT-VSA")
    nodes, jumped = _kernels.walk_indirect(
        g.indptr, g.indices, w, cdf, last, b.v_indptr, b.v_indices,
        start, budget, False, rng)
    return SamplePath(nodes, g.degrees[nodes] + w[nodes], jumped)


# -- two coupled walks (RWT-RWA) ----------------------------------------------


@dataclass
class RwtRwaState:
    """Positions of the three chains and the weights driving them."""

    x: int
    y: int
    x_mh: int
    desired_wU: np.ndarray
    derived_wV: np.ndarray
    step: int = 0


@dataclass
class RwtRwaRun:
    path: SamplePath
    y_path: np.ndarray
    mh_path: np.ndarray
    fallback: np.ndarray
    state: RwtRwaState
    weights: object = field(repr=False, default=None)


def rwt_rwa_walk(net, alpha, beta, desired_wU, starts, budget, rng):
    """RWT-RWA sample path from three coupled chains.

    ``starts`` is ``(x, y, x_mh)``; any entry may be ``None`` to draw it:
    ``x`` uniform over nodes the walk can leave, ``y`` a bridge neighbor of
    ``x`` (or uniform), ``x_mh`` uniform over nodes with positive desired
    weight. ``desired_wU`` of ``None`` means the uniform default.
    """
    from .weights import compute_rwtrwa_weights, default_desired_weights

    budget = _check_budget(budget)
    rng = make_rng(rng)
    if desired_wU is None:
        desired_wU = default_desired_weights(net, alpha)
    rw = compute_rwtrwa_weights(net, alpha, beta, desired_wU)
    g, a, b = net.target, net.auxiliary, net.bridge
    w_u = rw.desired_wU
    x0, y0, m0 = starts if starts is not None else (None, None, None)
    x0 = _resolve_start(x0, (g.degrees + w_u) > 0, rng, "RWT-RWA target walk")
    if y0 is None:
        nb = b.u_neighbors(x0)
        if len(nb):
            y0 = int(nb[int(rng.random() * len(nb))])
        else:
            y0 = _resolve_start(None, (a.degrees + rw.wV) > 0, rng, "RWT-RWA auxiliary walk")
    if m0 is None:
        pos = w_u > 0
        m0 = _resolve_start(None, pos, rng, "RWT-RWA MH chain") if pos.any() else x0
    xs, ys, ms, jumped, fallback = _kernels.walk_rwtrwa(
        g.indptr, g.indices, a.indptr, a.indices,
        b.u_indptr, b.u_indices, b.v_indptr, b.v_indices,
        np.ascontiguousarray(w_u, dtype=float), rw.wV, rw.proposal_wU,
        int(x0), int(y0), int(m0), budget, rng)
    path = SamplePath(xs, g.degrees[xs] + w_u[xs], jumped)
    state = RwtRwaState(int(xs[-1]), int(ys[-1]), int(ms[-1]), w_u, rw.wV, budget)
    return RwtRwaRun(path, ys, ms, fallback.astype(bool), state, rw)
