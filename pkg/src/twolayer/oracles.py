"""Exact transition matrices for tiny instances and their stationary laws."""

import numpy as np

from .errors import ParameterError
from .walkers import _lookup_table, vsa_b_weights

MAX_STATES = 1000


def _guard(states):
    if states > MAX_STATES:
        raise ParameterError(f"{states} states exceed the dense-matrix limit of {MAX_STATES}")


def build_modified_transition_matrix(net, alpha, weights):
    """RWT-VSA chain on ``U + {j}`` (jumper state last).

    ``P[u, u'] = 1 / (d_u + w_u)`` on target edges, ``P[u, j] = w_u / (d_u + w_u)``,
    ``P[j, u] = b_u / sum(b)``. A node with neither edges nor jump weight is
    unreachable and gets a self-loop so every row sums to one.
    """
    g = net.target
    n = g.node_count
    _guard(n + 1)
    b = vsa_b_weights(net, _lookup_table(weights, net.bridge.v_count))
    w = alpha * b
    P = np.zeros((n + 1, n + 1))
    for u in range(n):
        tot = g.degree(u) + w[u]
        if tot <= 0:
            P[u, u] = 1.0
            continue
        P[u, g.neighbors(u)] = 1.0 / tot
        P[u, n] = w[u] / tot
    if b.sum() > 0:
        P[n, :n] = b / b.sum()
    else:
        P[n, n] = 1.0
    return P


def rwtvsa_stationary(net, alpha, weights):
    """Stationary law ``pi ∝ (d_u + w_u ..., sum(w))`` of the RWT-VSA chain."""
    w = alpha * vsa_b_weights(net, _lookup_table(weights, net.bridge.v_count))
    pi = np.append(net.target.degrees + w, w.sum())
    return pi / pi.sum()


def rwwj_transition_matrix(g, alpha):
    """RWwJ on ``U``: ``P[i, j] = (alpha/n + 1{(i,j) in E}) / (d_i + alpha)``."""
    n = g.node_count
    _guard(n)
    if alpha <= 0 and np.any(g.degrees == 0):
        raise ParameterError("isolated node without jumps")
    P = np.full((n, n), alpha / n)
    for i in range(n):
        P[i, g.neighbors(i)] += 1.0
    return P / (g.degrees + alpha)[:, None]


def stationary_distribution(P):
    """Stationary vector of an irreducible stochastic matrix by a direct solve."""
    n = P.shape[0]
    A = np.vstack((P.T - np.eye(n), np.ones((1, n))))
    rhs = np.zeros(n + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    return pi


def power_iteration(P, tol=1e-15, max_iter=1_000_000):
    """Leading left eigenvector of ``P`` via the lazy chain ``(I + P) / 2``.

    Laziness removes periodicity without changing the stationary law.
    """
    n = P.shape[0]
    lazy = 0.5 * (np.eye(n) + P)
    pi = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = pi @ lazy
        nxt /= nxt.sum()
        if np.max(np.abs(nxt - pi)) < tol:
            return nxt
        pi = nxt
    return pi


def detailed_balance_violation(P, pi):
    """``max |pi_i P_ij - pi_j P_ji|`` over all state pairs."""
    flow = pi[:, None] * P
    return float(np.max(np.abs(flow - flow.T)))


def total_variation(p, q):
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())
