# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; semantics and draw order identical to ``_pykernels``."""

from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.stdlib cimport malloc, free
from numpy.random cimport bitgen_t

import numpy as np

from ..errors import StructureError

ctypedef long long i64


cdef inline bitgen_t* _bitgen(rng) except NULL:
    return <bitgen_t*>PyCapsule_GetPointer(rng.bit_generator.capsule, "BitGenerator")


cdef inline double _u(bitgen_t* g) noexcept nogil:
    return g.next_double(g.state)


cdef inline i64 _pick_weighted(const double[::1] cdf, i64 last_positive, double r) noexcept nogil:
    # first index with cdf[idx] > r (bisect_right)
    cdef i64 lo = 0, hi = cdf.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if r < cdf[mid]:
            hi = mid
        else:
            lo = mid + 1
    return lo if lo <= last_positive else last_positive


def walk_indirect(const i64[::1] indptr, const i64[::1] indices, const double[::1] w,
                  const double[::1] jump_cdf, i64 last_positive,
                  const i64[::1] jump_indptr, const i64[::1] jump_indices,
                  i64 start, i64 budget, bint jump_always, rng):
    cdef bitgen_t* g = _bitgen(rng)
    nodes_arr = np.empty(budget, dtype=np.int64)
    jumped_arr = np.zeros(budget, dtype=np.uint8)
    cdef i64[::1] nodes = nodes_arr
    cdef unsigned char[::1] jumped = jumped_arr
    cdef double total = jump_cdf[jump_cdf.shape[0] - 1] if jump_cdf.shape[0] else 0.0
    cdef i64 x = start, i, lo, d, k, v, vlo
    cdef double wx, tot
    cdef bint jump
    cdef int status = 0
    with rng.bit_generator.lock, nogil:
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
                    status = 1
                    break
                k = <i64>(_u(g) * tot)
                jump = k >= d and wx > 0
                if not jump:
                    x = indices[lo + (k if k < d else d - 1)]
            if jump:
                if total <= 0:
                    status = 2
                    break
                v = _pick_weighted(jump_cdf, last_positive, _u(g) * total)
                vlo = jump_indptr[v]
                x = jump_indices[vlo + <i64>(_u(g) * (jump_indptr[v + 1] - vlo))]
                jumped[i + 1] = 1
    if status == 1:
        raise StructureError(f"walker stuck at node {x}: no neighbors and no jump weight")
    if status == 2:
        raise StructureError("jump requested but no auxiliary node is covered")
    return nodes_arr, jumped_arr


def vsa1_draws(const double[::1] jump_cdf, i64 last_positive, const i64[::1] jump_indptr,
               const i64[::1] jump_indices, i64 budget, rng):
    cdef double total = jump_cdf[jump_cdf.shape[0] - 1] if jump_cdf.shape[0] else 0.0
    if total <= 0:
        raise StructureError("no auxiliary node with bridge neighbors can be sampled")
    cdef bitgen_t* g = _bitgen(rng)
    out_arr = np.empty(budget, dtype=np.int64)
    cdef i64[::1] out = out_arr
    cdef i64 i, v, vlo
    with rng.bit_generator.lock, nogil:
        for i in range(budget):
            v = _pick_weighted(jump_cdf, last_positive, _u(g) * total)
            vlo = jump_indptr[v]
            out[i] = jump_indices[vlo + <i64>(_u(g) * (jump_indptr[v + 1] - vlo))]
    return out_arr


def walk_rwtrwa(const i64[::1] g_indptr, const i64[::1] g_indices,
                const i64[::1] a_indptr, const i64[::1] a_indices,
                const i64[::1] bu_indptr, const i64[::1] bu_indices,
                const i64[::1] bv_indptr, const i64[::1] bv_indices,
                const double[::1] w_u, const double[::1] w_v, const double[::1] wp_u,
                i64 x0, i64 y0, i64 m0, i64 budget, rng):
    cdef bitgen_t* g = _bitgen(rng)
    xs_arr = np.empty(budget, dtype=np.int64)
    ys_arr = np.empty(budget, dtype=np.int64)
    ms_arr = np.empty(budget, dtype=np.int64)
    jumped_arr = np.zeros(budget, dtype=np.uint8)
    fallback_arr = np.zeros(budget, dtype=np.uint8)
    cdef i64[::1] xs = xs_arr, ys = ys_arr, ms = ms_arr
    cdef unsigned char[::1] jumped = jumped_arr, fallback = fallback_arr
    cdef i64 x = x0, y = y0, m = m0, y_new, i, k, alo, dy, blo, dxb, dyb, u, glo, dx
    cdef double wy, wx, r
    cdef int status = 0
    with rng.bit_generator.lock, nogil:
        for i in range(budget):
            xs[i] = x
            ys[i] = y
            ms[i] = m
            if i == budget - 1:
                break
            alo = a_indptr[y]
            dy = a_indptr[y + 1] - alo
            wy = w_v[y]
            y_new = y
            if dy + wy > 0:
                k = <i64>(_u(g) * (dy + wy))
                if k >= dy and wy > 0:
                    blo = bu_indptr[x]
                    dxb = bu_indptr[x + 1] - blo
                    if dxb > 0:
                        y_new = bu_indices[blo + <i64>(_u(g) * dxb)]
                    else:
                        fallback[i + 1] = 1
                        if dy > 0:
                            y_new = a_indices[alo + <i64>(_u(g) * dy)]
                else:
                    y_new = a_indices[alo + (k if k < dy else dy - 1)]
            blo = bv_indptr[y]
            dyb = bv_indptr[y + 1] - blo
            if dyb > 0:
                u = bv_indices[blo + <i64>(_u(g) * dyb)]
                if w_u[u] > 0:
                    if w_u[m] <= 0 or wp_u[u] <= 0:
                        m = u
                    else:
                        r = (w_u[u] * wp_u[m]) / (w_u[m] * wp_u[u])
                        if r >= 1.0 or _u(g) < r:
                            m = u
            glo = g_indptr[x]
            dx = g_indptr[x + 1] - glo
            wx = w_u[x]
            if dx + wx <= 0:
                status = 1
                break
            k = <i64>(_u(g) * (dx + wx))
            if k >= dx and wx > 0:
                x = m
                jumped[i + 1] = 1
            else:
                x = g_indices[glo + (k if k < dx else dx - 1)]
            y = y_new
    if status == 1:
        raise StructureError(f"target walker stuck at node {x}")
    return xs_arr, ys_arr, ms_arr, jumped_arr, fallback_arr


def ba_edges(i64 n, i64 m, rng):
    cdef bitgen_t* g = _bitgen(rng)
    cdef i64 total = m * (m + 1) // 2 + (n - m - 1) * m
    edges_arr = np.empty((total, 2), dtype=np.int64)
    cdef i64[:, ::1] edges = edges_arr
    cdef i64* rep = <i64*>malloc(sizeof(i64) * (2 * total + 1))
    cdef i64* targets = <i64*>malloc(sizeof(i64) * (m + 1))
    if rep == NULL or targets == NULL:
        free(rep)
        free(targets)
        raise MemoryError()
    cdef i64 size = 0, e = 0, i, j, s, chosen, t, q
    cdef bint dup
    try:
        with rng.bit_generator.lock, nogil:
            for i in range(m + 1):
                for j in range(i + 1, m + 1):
                    edges[e, 0] = i
                    edges[e, 1] = j
                    e += 1
                    rep[size] = i
                    rep[size + 1] = j
                    size += 2
            for s in range(m + 1, n):
                chosen = 0
                while chosen < m:
                    t = rep[<i64>(_u(g) * size)]
                    dup = False
                    for q in range(chosen):
                        if targets[q] == t:
                            dup = True
                            break
                    if not dup:
                        targets[chosen] = t
                        chosen += 1
                for q in range(m):
                    edges[e, 0] = s
                    edges[e, 1] = targets[q]
                    e += 1
                    rep[size + q] = targets[q]
                for q in range(m):
                    rep[size + m + q] = s
                size += 2 * m
    finally:
        free(rep)
        free(targets)
    return edges_arr
