"""Auxiliary-graph vertex samplers with known relative selection weights.

A sampler yields :class:`WeightedVertexSample` pairs ``(v, a_v)`` where ``v``
is drawn with probability proportional to ``a_v``. Samplers that know the
weight of every node up front also expose :meth:`weight_table`, which lets
the walkers hand the sampling to a compiled kernel.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ParameterError


class WeightedVertexSample(NamedTuple):
    v: int
    a_v: float


class UniformSampler:
    """Uniform node sampling on ``0..count-1`` (``a_v = 1``)."""

    def __init__(self, count):
        if count < 1:
            raise ParameterError("uniform sampler needs at least one node")
        self.count = int(count)

    def draw(self, rng):
        return WeightedVertexSample(int(rng.random() * self.count), 1.0)

    def weight_table(self):
        return np.ones(self.count)

    def __repr__(self):
        return f"UniformSampler({self.count})"


class WeightedSampler:
    """Draws ``v`` with probability proportional to a known weight table."""

    def __init__(self, weights):
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or len(w) == 0 or np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ParameterError("weights must be a nonempty vector of finite values >= 0")
        if w.sum() <= 0:
            raise ParameterError("at least one weight must be positive")
        self.weights = w
        self._cdf = np.cumsum(w)

    def draw(self, rng):
        v = int(np.searchsorted(self._cdf, rng.random() * self._cdf[-1], side="right"))
        v = min(v, int(np.flatnonzero(self.weights)[-1]))
        return WeightedVertexSample(v, float(self.weights[v]))

    def weight_table(self):
        return self.weights


def uni_sampler(count, rng):
    """Endless stream of uniform samples over ``count`` auxiliary nodes."""
    sampler = UniformSampler(count)
    while True:
        yield sampler.draw(rng)


# -- random region zoom-in --------------------------------------------------


@dataclass(frozen=True)
class GeoVenue:
    venue_id: int
    lat: float
    lon: float

    def __post_init__(self):
        if not -90.0 <= self.lat <= 90.0:
            raise ParameterError(f"venue {self.venue_id}: latitude {self.lat} out of range")
        if not -180.0 <= self.lon <= 180.0:
            raise ParameterError(f"venue {self.venue_id}: longitude {self.lon} out of range")


@dataclass(frozen=True)
class Region:
    lat_min: float
    lat_max: float
    lon_min: float
    lon_max: float

    def __post_init__(self):
        if not (self.lat_min < self.lat_max and self.lon_min < self.lon_max):
            raise ParameterError(f"degenerate region {self}")

    def contains(self, lat, lon):
        """Closed-open membership ``[min, max)`` on both axes (vectorized)."""
        return ((self.lat_min <= lat) & (lat < self.lat_max)
                & (self.lon_min <= lon) & (lon < self.lon_max))

    def split(self, depth):
        """Halves of the region at zoom depth ``depth``.

        Even depths cut longitude, odd depths latitude; the lower half comes
        first.
        """
        if depth % 2 == 0:
            mid = 0.5 * (self.lon_min + self.lon_max)
            return (Region(self.lat_min, self.lat_max, self.lon_min, mid),
                    Region(self.lat_min, self.lat_max, mid, self.lon_max))
        mid = 0.5 * (self.lat_min + self.lat_max)
        return (Region(self.lat_min, mid, self.lon_min, self.lon_max),
                Region(mid, self.lat_max, self.lon_min, self.lon_max))


NYC_REGION = Region(40.4, 41.4, -74.3, -73.3)

MAX_ZOOM_DEPTH = 30


def _venue_arrays(venues):
    ids = np.array([v.venue_id for v in venues], dtype=np.int64)
    lat = np.array([v.lat for v in venues], dtype=float)
    lon = np.array([v.lon for v in venues], dtype=float)
    return ids, lat, lon


def _check_rrzi_args(lat, lon, root, k):
    if k < 2:
        raise ParameterError("RRZI needs K >= 2 (a region is accessible when it holds fewer than K venues)")
    if not np.any(root.contains(lat, lon)):
        raise ParameterError("no venue inside the root region")


def rrzi_sample(venues, root, k, rng, max_depth=MAX_ZOOM_DEPTH):
    """One random-region-zoom-in venue sample.

    Halves the current region, keeping either half with probability 1/2,
    until it holds fewer than ``k`` venues (or ``max_depth`` is reached, where
    the query is assumed to list everything). A nonempty accessible region
    with ``m`` venues yields one of them uniformly with
    ``a_v = 2**-depth / m``; an empty one restarts from ``root``.
    """
    ids, lat, lon = _venue_arrays(venues)
    _check_rrzi_args(lat, lon, root, k)
    while True:
        region, depth = root, 0
        inside = np.flatnonzero(root.contains(lat, lon))
        while len(inside) >= k and depth < max_depth:
            region = region.split(depth)[int(rng.random() * 2)]
            depth += 1
            inside = inside[region.contains(lat[inside], lon[inside])]
        if len(inside):
            m = len(inside)
            pick = inside[int(rng.random() * m)]
            return WeightedVertexSample(int(ids[pick]), 2.0 ** -depth / m)


def rrzi_inclusion_oracle(venues, root, k, max_depth=MAX_ZOOM_DEPTH):
    """Exact RRZI inclusion probabilities by enumerating every zoom path.

    Returns ``{venue_id: probability}`` conditioned on a successful
    (nonempty) leaf, so the values sum to one.
    """
    ids, lat, lon = _venue_arrays(venues)
    _check_rrzi_args(lat, lon, root, k)
    acc = {}
    success = 0.0

    def visit(region, depth, inside):
        nonlocal success
        if len(inside) < k or depth >= max_depth:
            if len(inside):
                share = 2.0 ** -depth / len(inside)
                success += 2.0 ** -depth
                for i in inside:
                    acc[int(ids[i])] = acc.get(int(ids[i]), 0.0) + share
            return
        for half in region.split(depth):
            visit(half, depth + 1, inside[half.contains(lat[inside], lon[inside])])

    visit(root, 0, np.flatnonzero(root.contains(lat, lon)))
    return {v: p / success for v, p in acc.items()}


class RRZISampler:
    """Random region zoom-in over a fixed venue set.

    The zoom tree is static for given venues, root and ``k``, so it is built
    once; draws then only descend it. ``a_v`` of every venue is known from its
    leaf, which :meth:`weight_table` exposes for walkers that need it.
    """

    def __init__(self, venues, root, k, aux_count=None, max_depth=MAX_ZOOM_DEPTH):
        ids, lat, lon = _venue_arrays(venues)
        _check_rrzi_args(lat, lon, root, k)
        self.root = root
        self.k = int(k)
        self.aux_count = int(aux_count) if aux_count is not None else int(ids.max()) + 1
        children, depth, leaf_lo, leaf_hi, order = [], [], [], [], []

        def build(region, d, inside):
            node = len(children)
            children.append(None)
            depth.append(d)
            leaf_lo.append(len(order))
            if len(inside) < self.k or d >= max_depth:
                order.extend(inside.tolist())
                leaf_hi.append(len(order))
                children[node] = (-1, -1)
                return node
            leaf_hi.append(len(order))
            lo_half, hi_half = region.split(d)
            left = build(lo_half, d + 1, inside[lo_half.contains(lat[inside], lon[inside])])
            right = build(hi_half, d + 1, inside[hi_half.contains(lat[inside], lon[inside])])
            children[node] = (left, right)
            return node

        build(root, 0, np.flatnonzero(root.contains(lat, lon)))
        self._children = np.array(children, dtype=np.int64)
        self._depth = np.array(depth, dtype=np.int64)
        self._lo = np.array(leaf_lo, dtype=np.int64)
        self._size = np.array(leaf_hi, dtype=np.int64) - self._lo
        self._venue = ids[np.array(order, dtype=np.int64)]
        leaves = self._children[:, 0] < 0
        self._a = np.where(leaves & (self._size > 0),
                           2.0 ** -self._depth.astype(float) / np.maximum(self._size, 1), 0.0)

    def draw(self, rng):
        while True:
            node = 0
            while self._children[node, 0] >= 0:
                node = self._children[node, int(rng.random() * 2)]
            m = self._size[node]
            if m:
                v = self._venue[self._lo[node] + int(rng.random() * m)]
                return WeightedVertexSample(int(v), float(self._a[node]))

    def draw_many(self, n, rng):
        """``n`` independent draws as ``(venue_ids, a_v)`` arrays."""
        nodes = np.zeros(n, dtype=np.int64)
        pending = np.arange(n)
        while len(pending):
            cur = np.zeros(len(pending), dtype=np.int64)
            inner = np.flatnonzero(self._children[cur, 0] >= 0)
            while len(inner):
                side = (rng.random(len(inner)) < 0.5).astype(np.int64)
                cur[inner] = self._children[cur[inner], 1 - side]
                inner = inner[self._children[cur[inner], 0] >= 0]
            nodes[pending] = cur
            pending = pending[self._size[cur] == 0]
        pick = self._lo[nodes] + (rng.random(n) * self._size[nodes]).astype(np.int64)
        return self._venue[pick], self._a[nodes]

    def weight_table(self):
        """``a_v`` per auxiliary node id; zero for nodes outside the root."""
        table = np.zeros(self.aux_count)
        leaves = np.flatnonzero((self._children[:, 0] < 0) & (self._size > 0))
        for leaf in leaves:
            lo = self._lo[leaf]
            table[self._venue[lo:lo + self._size[leaf]]] = self._a[leaf]
        return table
