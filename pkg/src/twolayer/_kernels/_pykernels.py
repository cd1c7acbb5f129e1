"""Pure-Python kernels.

Reference semantics for the compiled module ``_ckernels``: both consume the
generator's uniform doubles in the same order, so a seed produces identical
output on either backend. Every discrete choice is ``floor(u * k)`` on a
single uniform ``u``.
"""

from bisect import bisect_right

import numpy as np

from ..errors import StructureError


def _pick_weighted(cdf, last_positive, r):
    v = bisect_right(cdf, r)
    return v if v <= last_positive else last_positive


def walk_indirect(indptr, indices, w, jump_cdf, last_positive, jump_indptr,
                  jump_indices, start, budget, jump_always, rng):
    """Random walk with (indirect) jumps.

    At ``x`` one uniform ``u`` picks ``k = floor(u * (d_x + w_x))``: ``k < d_x``
    moves to the k-th neighbor, otherwise the walker jumps by drawing ``v``
    from ``jump_cdf`` and then a uniform member of ``v``'s jump list.
    """
    indptr = indptr.tolist()
    indices = indices.tolist()
    w = w.tolist()
    cdf = jump_cdf.tolist()
    total = cdf[-1] if cdf else 0.0
    jptr = jump_indptr.tolist()
    jidx = jump_indices.tolist()
    random = rng.random
    nodes = np.empty(budget, dtype=np.int64)
    jumped = np.zeros(budget, dtype=np.uint8)
    x = int(start)
    for i in range(budget):
        nodes[i] = x
        if i == budget - 1:
            break
        lo = indptr[x]
        d = indptr[x + 1] - lo
        if jump_always:
            jump = True
        else:
            wx = w[x]
            tot = d + wx
            if tot <= 0:
                raise StructureError(f"walker stuck at node {x}: no neighbors and no jump weight")
            k = int(random() * tot)
            jump = k >= d and wx > 0
            if not jump:
                x = indices[lo + (k if k < d else d - 1)]
        if jump:
            if total <= 0:
                raise StructureError("jump requested but no auxiliary node is covered")
            v = _pick_weighted(cdf, last_positive, random() * total)
            vlo = jptr[v]
            x = jidx[vlo + int(random() * (jptr[v + 1] - vlo))]
            jumped[i + 1] = 1
    return nodes, jumped


def vsa1_draws(jump_cdf, last_positive, jump_indptr, jump_indices, budget, rng):
    """Independent draws: ``v`` by weight, then a uniform bridge neighbor of ``v``."""
    cdf = jump_cdf.tolist()
    total = cdf[-1] if cdf else 0.0
    if total <= 0:
        raise StructureError("no auxiliary node with bridge neighbors can be sampled")
    jptr = jump_indptr.tolist()
    jidx = jump_indices.tolist()
    random = rng.random
    out = np.empty(budget, dtype=np.int64)
    for i in range(budget):
        v = _pick_weighted(cdf, last_positive, random() * total)
        vlo = jptr[v]
        out[i] = jidx[vlo + int(random() * (jptr[v + 1] - vlo))]
    return out


def walk_rwtrwa(g_indptr, g_indices, a_indptr, a_indices, bu_indptr, bu_indices,
                bv_indptr, bv_indices, w_u, w_v, wp_u, x0, y0, m0, budget, rng):
    """Three coupled chains: walk ``y`` on G', MH chain ``m`` on U, walk ``x`` on G.

    Per step ``y`` advances first (jumping to a bridge neighbor of the current
    ``x``), then the MH chain proposes a bridge neighbor of the *previous*
    ``y``, then ``x`` walks or jumps to the new MH state.
    Returns ``(x, y, m, jumped, fallback)``; ``fallback`` flags steps where the
    G'-walk wanted to jump but ``x`` had no bridge neighbor.
    """
    gp, gi = g_indptr.tolist(), g_indices.tolist()
    ap, ai = a_indptr.tolist(), a_indices.tolist()
    bup, bui = bu_indptr.tolist(), bu_indices.tolist()
    bvp, bvi = bv_indptr.tolist(), bv_indices.tolist()
    wu, wv, wpu = w_u.tolist(), w_v.tolist(), wp_u.tolist()
    random = rng.random
    xs = np.empty(budget, dtype=np.int64)
    ys = np.empty(budget, dtype=np.int64)
    ms = np.empty(budget, dtype=np.int64)
    jumped = np.zeros(budget, dtype=np.uint8)
    fallback = np.zeros(budget, dtype=np.uint8)
    x, y, m = int(x0), int(y0), int(m0)
    for i in range(budget):
        xs[i] = x
        ys[i] = y
        ms[i] = m
        if i == budget - 1:
            break
        # G' walk
        alo = ap[y]
        dy = ap[y + 1] - alo
        wy = wv[y]
        y_new = y
        if dy + wy > 0:
            k = int(random() * (dy + wy))
            if k >= dy and wy > 0:
                blo = bup[x]
                dxb = bup[x + 1] - blo
                if dxb > 0:
                    y_new = bui[blo + int(random() * dxb)]
                else:
                    fallback[i + 1] = 1
                    if dy > 0:
                        y_new = ai[alo + int(random() * dy)]
            else:
                y_new = ai[alo + (k if k < dy else dy - 1)]
        # MH chain, proposal from the bridge neighbors of the old y
        blo = bvp[y]
        dyb = bvp[y + 1] - blo
        if dyb > 0:
            u = bvi[blo + int(random() * dyb)]
            if wu[u] > 0:
                if wu[m] <= 0 or wpu[u] <= 0:
                    m = u
                else:
                    r = (wu[u] * wpu[m]) / (wu[m] * wpu[u])
                    if r >= 1.0 or random() < r:
                        m = u
        # G walk
        glo = gp[x]
        dx = gp[x + 1] - glo
        wx = wu[x]
        if dx + wx <= 0:
            raise StructureError(f"target walker stuck at node {x}")
        k = int(random() * (dx + wx))
        if k >= dx and wx > 0:
            x = m
            jumped[i + 1] = 1
        else:
            x = gi[glo + (k if k < dx else dx - 1)]
        y = y_new
    return xs, ys, ms, jumped, fallback


def ba_edges(n, m, rng):
    """Barabasi-Albert edges: ``K_{m+1}`` seed, then ``m`` distinct
    preferential targets per new node drawn from the endpoint list."""
    random = rng.random
    total = m * (m + 1) // 2 + (n - m - 1) * m
    edges = np.empty((total, 2), dtype=np.int64)
    rep = []
    e = 0
    for i in range(m + 1):
        for j in range(i + 1, m + 1):
            edges[e] = (i, j)
            e += 1
            rep.append(i)
            rep.append(j)
    targets = [0] * m
    for s in range(m + 1, n):
        chosen = 0
        size = len(rep)
        while chosen < m:
            t = rep[int(random() * size)]
            if t not in targets[:chosen]:
                targets[chosen] = t
                chosen += 1
        for t in targets:
            edges[e] = (s, t)
            e += 1
        rep.extend(targets)
        rep.extend([s] * m)
    return edges
