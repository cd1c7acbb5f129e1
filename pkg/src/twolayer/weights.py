"""Jump weights of the two coupled walks (RWT-RWA).

Target nodes carry weights ``w_U`` summing to ``alpha``, auxiliary nodes
weights ``w_V``. They determine each other through the walks' stationary laws

    pi_u = (d_u + w_u) / (2|E| + alpha),    w_v = beta  * sum_{u in U_v} pi_u / d_u^(b)
    pi_v = (d_v + w_v) / (2|E'| + beta),    w_u = alpha * sum_{v in V_u} pi_v / d_v^(b)

Given arbitrary desired ``w_U``, the last relation produces a different
proposal ``w'_U``; the MH chain corrects for that mismatch.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import NumericalError, ParameterError

DENSE_LIMIT = 2000


@dataclass
class RwtRwaWeights:
    desired_wU: np.ndarray
    wV: np.ndarray
    proposal_wU: np.ndarray
    piU: np.ndarray
    piV: np.ndarray


def default_desired_weights(net, alpha):
    """Uniform desired weights over target nodes with bridge edges, summing to ``alpha``.

    Nodes without bridge edges can never be proposed by the MH chain, so
    they get zero weight.
    """
    covered = net.bridge.u_degrees > 0
    k = int(covered.sum())
    if k == 0:
        raise ParameterError("no target node has a bridge edge")
    return np.where(covered, float(alpha) / k, 0.0)


def _sum_over_v(bridge, per_u):
    """``out[v] = sum_{u in U_v} per_u[u] / d_u^(b)``."""
    e = bridge.edges()
    return np.bincount(e[:, 1], weights=per_u[e[:, 0]] / bridge.u_degrees[e[:, 0]],
                       minlength=bridge.v_count)


def _sum_over_u(bridge, per_v):
    """``out[u] = sum_{v in V_u} per_v[v] / d_v^(b)``."""
    e = bridge.edges()
    return np.bincount(e[:, 0], weights=per_v[e[:, 1]] / bridge.v_degrees[e[:, 1]],
                       minlength=bridge.u_count)


def compute_rwtrwa_weights(net, alpha, beta, desired_wU):
    """Derived ``w_V``, proposal ``w'_U`` and both stationary laws for desired ``w_U``.

    ``pi_V`` is normalized by ``2|E'| + sum(w_V)``; that sum equals ``beta``
    only when every target node has bridge edges.
    """
    if alpha < 0 or beta < 0:
        raise ParameterError("alpha and beta must be >= 0")
    g, a, b = net.target, net.auxiliary, net.bridge
    w_u = np.asarray(desired_wU, dtype=float)
    if w_u.shape != (g.node_count,) or np.any(w_u < 0):
        raise ParameterError("desired_wU must be a nonnegative vector over target nodes")
    if np.any(w_u[b.u_degrees == 0] != 0):
        raise ParameterError("desired weight must be zero on target nodes without bridge edges")
    if not np.isclose(w_u.sum(), alpha, rtol=1e-9, atol=1e-12):
        raise ParameterError(f"desired weights sum to {w_u.sum()!r}, expected alpha={alpha!r}")
    pi_u = (g.degrees + w_u) / (2 * g.edge_count + alpha)
    w_v = beta * _sum_over_v(b, pi_u)
    z_v = 2 * a.edge_count + w_v.sum()
    if z_v <= 0:
        raise ParameterError("auxiliary walk has no edges and no jump weight")
    pi_v = (a.degrees + w_v) / z_v
    proposal = alpha * _sum_over_u(b, pi_v)
    return RwtRwaWeights(w_u, w_v, proposal, pi_u, pi_v)


def _require_covered(net):
    b = net.bridge
    if np.any(b.u_degrees == 0) or np.any(b.v_degrees == 0):
        raise ParameterError("fixed-point weights need every node on both sides to have bridge edges")


def _constants(net, alpha, beta):
    c = alpha / (2 * net.auxiliary.edge_count + beta)
    cp = beta / (2 * net.target.edge_count + alpha)
    return c, cp


def solve_fixed_point_weights(net, alpha, beta):
    """Self-consistent ``(w_U*, w_V*)`` from the closed form.

    Solves ``(I - c c' A D_V^-1 A^T D_U^-1) w_U = c A D_V^-1 (d_V + c' A^T D_U^-1 d_U)``
    with ``c = alpha / (2|E'| + beta)``, ``c' = beta / (2|E| + alpha)``, then
    the symmetric system for ``w_V``.
    """
    _require_covered(net)
    if alpha < 0 or beta < 0:
        raise ParameterError("alpha and beta must be >= 0")
    denom_v = 2 * net.auxiliary.edge_count + beta
    denom_u = 2 * net.target.edge_count + alpha
    if denom_v <= 0 or denom_u <= 0:
        raise NumericalError("empty graphs with zero jump weight", condition=np.inf)
    c, cp = _constants(net, alpha, beta)
    b = net.bridge
    e = b.edges()
    n, m = b.u_count, b.v_count
    A = sp.csr_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, m))
    inv_du = sp.diags(1.0 / b.u_degrees)
    inv_dv = sp.diags(1.0 / b.v_degrees)
    d_u = net.target.degrees.astype(float)
    d_v = net.auxiliary.degrees.astype(float)
    AV = A @ inv_dv
    AtU = A.T @ inv_du
    rhs_u = c * (AV @ (d_v + cp * (AtU @ d_u)))
    rhs_v = cp * (AtU @ (d_u + c * (AV @ d_v)))
    w_u = _solve(sp.identity(n) - c * cp * (AV @ AtU), rhs_u)
    w_v = _solve(sp.identity(m) - c * cp * (AtU @ AV), rhs_v)
    return w_u, w_v


def _solve(M, rhs):
    if M.shape[0] <= DENSE_LIMIT:
        dense = M.toarray()
        cond = np.linalg.cond(dense)
        if not np.isfinite(cond) or cond > 1e14:
            raise NumericalError(f"fixed-point system is singular (condition {cond:.3g})", condition=cond)
        return np.linalg.solve(dense, rhs)
    try:
        lu = spla.splu(sp.csc_matrix(M))
    except RuntimeError as exc:
        raise NumericalError(f"fixed-point system is singular: {exc}", condition=np.inf) from None
    out = lu.solve(rhs)
    if not np.all(np.isfinite(out)):
        raise NumericalError("fixed-point solve produced non-finite weights", condition=np.inf)
    return out


def iterate_fixed_point_weights(net, alpha, beta, iterations=10_000, w_u=None, w_v=None):
    """Fixed-point substitution of the weight relations, starting from zero.

    Independent of the closed form; converges geometrically with rate
    ``c * c'``.
    """
    _require_covered(net)
    b = net.bridge
    d_u = net.target.degrees.astype(float)
    d_v = net.auxiliary.degrees.astype(float)
    z_u = 2 * net.target.edge_count + alpha
    z_v = 2 * net.auxiliary.edge_count + beta
    w_u = np.zeros(b.u_count) if w_u is None else np.array(w_u, dtype=float)
    w_v = np.zeros(b.v_count) if w_v is None else np.array(w_v, dtype=float)
    for _ in range(iterations):
        w_u_next = alpha * _sum_over_u(b, (d_v + w_v) / z_v)
        w_v = beta * _sum_over_v(b, (d_u + w_u_next) / z_u)
        if np.array_equal(w_u_next, w_u):
            break
        w_u = w_u_next
    return w_u, w_v


def fixed_point_residuals(net, alpha, beta, w_u, w_v):
    """Relative residuals ``(r_U, r_V)`` of the weight relations at ``(w_u, w_v)``.

    Each is ``max|w - f(w)| / max(1, max|w|)``.
    """
    b = net.bridge
    pi_u = (net.target.degrees + w_u) / (2 * net.target.edge_count + alpha)
    pi_v = (net.auxiliary.degrees + w_v) / (2 * net.auxiliary.edge_count + beta)
    r_u = np.max(np.abs(w_u - alpha * _sum_over_u(b, pi_v)), initial=0.0)
    r_v = np.max(np.abs(w_v - beta * _sum_over_v(b, pi_u)), initial=0.0)
    return (r_u / max(1.0, np.max(np.abs(w_u), initial=0.0)),
            r_v / max(1.0, np.max(np.abs(w_v), initial=0.0)))
