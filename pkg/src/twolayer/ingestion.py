"""Readers and writers for edge lists, check-ins, pair lists and network directories.

External ids (any whitespace-free token) are remapped to dense integers in
order of first appearance; the mapping is returned so results can be
translated back. A network directory holds three text files whose first line
records the node counts, so isolated nodes survive a round trip.
"""

import csv
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import IngestionError
from .graph import TwoLayerNetwork, build_bipartite, build_graph
from .vertex_samplers import GeoVenue

TARGET_FILE = "target.edges"
AUX_FILE = "auxiliary.edges"
BRIDGE_FILE = "bridge.pairs"
VENUE_FILE = "venues.txt"


def _data_lines(path):
    """``(line_number, fields)`` for non-blank, non-comment lines."""
    try:
        fh = open(path)
    except OSError as exc:
        raise IngestionError(f"cannot open: {exc.strerror}", path=path) from None
    with fh:
        for no, line in enumerate(fh, 1):
            text = line.strip()
            if text and not text.startswith("#"):
                yield no, text.split()


def _header(path):
    """``key value`` pairs from a leading ``# key value ...`` line, if any."""
    with open(path) as fh:
        first = fh.readline().strip()
    if not first.startswith("#"):
        return {}
    tokens = first[1:].split()
    out = {}
    for key, value in zip(tokens[::2], tokens[1::2]):
        try:
            out[key] = int(value)
        except ValueError:
            pass
    return out


class IdMap(dict):
    """External id -> dense id, assigned in order of first lookup."""

    def dense(self, key):
        got = self.get(key)
        if got is None:
            got = self[key] = len(self)
        return got

    def external(self):
        """Dense id -> external id as a list."""
        out = [None] * len(self)
        for k, v in self.items():
            out[v] = k
        return out


@dataclass
class EdgeListLoad:
    graph: object
    mapping: IdMap
    lines: int
    duplicates: int
    self_loops: int


def load_edge_list(path, directed=False, mapping=None):
    """Edge list ``src dst`` per line; ``#`` lines are comments.

    Directed inputs are symmetrized, so ``a b`` and ``b a`` become one
    undirected edge (not counted as a duplicate). Extra columns are ignored.
    """
    mapping = IdMap() if mapping is None else mapping
    src, dst = [], []
    self_loops = lines = 0
    for no, fields in _data_lines(path):
        if len(fields) < 2:
            raise IngestionError(f"expected 'src dst', got {' '.join(fields)!r}", path=path, line=no)
        a, b = mapping.dense(fields[0]), mapping.dense(fields[1])
        lines += 1
        if a == b:
            self_loops += 1
            continue
        src.append(a)
        dst.append(b)
    pairs = np.column_stack((src, dst)) if src else np.zeros((0, 2), dtype=np.int64)
    g = build_graph(pairs, len(mapping))
    if directed:
        # reciprocal arcs are the expected input; only repeated arcs count
        duplicates = len(pairs) - (len(np.unique(pairs, axis=0)) if len(pairs) else 0)
    else:
        duplicates = len(pairs) - g.edge_count
    return EdgeListLoad(g, mapping, lines, duplicates, self_loops)


def write_mapping(mapping, path):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["external_id", "dense_id"])
        for ext, dense in sorted(mapping.items(), key=lambda kv: kv[1]):
            out.writerow([ext, dense])


def read_mapping(path):
    mapping = IdMap()
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            mapping[row["external_id"]] = int(row["dense_id"])
    return mapping


# -- check-ins ----------------------------------------------------------------


@dataclass(frozen=True)
class CheckinRecord:
    user: str
    lat: float
    lon: float
    venue: str

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0 and -180.0 <= self.lon <= 180.0):
            raise ValueError(f"coordinates ({self.lat}, {self.lon}) out of range")


def load_checkins(path):
    """Stream check-ins in the SNAP layout ``user time lat lon venue``.

    The time column is read past and dropped.
    """
    for no, fields in _data_lines(path):
        if len(fields) != 5:
            raise IngestionError(f"expected 5 columns 'user time lat lon venue', got {len(fields)}",
                                 path=path, line=no)
        try:
            yield CheckinRecord(fields[0], float(fields[2]), float(fields[3]), fields[4])
        except ValueError as exc:
            raise IngestionError(str(exc), path=path, line=no) from None


@dataclass
class CheckinNetwork:
    """Two-layer network built from check-ins plus the id bookkeeping."""

    net: TwoLayerNetwork
    venues: list
    user_ids: np.ndarray
    venue_ids: list
    raw_checkins: int
    bridge_pairs: int = field(default=0)


def build_two_layer_from_checkins(social, checkins, region, user_map=None):
    """Target = social graph induced on users with an in-region check-in.

    Auxiliary nodes are the in-region venues (no auxiliary edges); bridge
    edges are the distinct (user, venue) pairs among in-region check-ins. A
    venue's location is that of its first check-in. ``user_map`` translates
    the records' user ids to ``social`` node ids; without it user ids must be
    the integer node ids themselves.
    """
    venue_map = IdMap()
    venue_pos = []
    pairs = set()
    raw = 0
    for rec in checkins:
        if not region.contains(rec.lat, rec.lon):
            continue
        if user_map is not None:
            if rec.user not in user_map:
                raise IngestionError(f"user {rec.user!r} is not in the social graph mapping")
            u = user_map[rec.user]
        else:
            try:
                u = int(rec.user)
            except ValueError:
                raise IngestionError(f"user id {rec.user!r} is not an integer node id") from None
        if not 0 <= u < social.node_count:
            raise IngestionError(f"user {rec.user!r} maps to node {u} outside the social graph")
        raw += 1
        before = len(venue_map)
        v = venue_map.dense(rec.venue)
        if v == before:
            venue_pos.append((rec.lat, rec.lon))
        pairs.add((u, v))
    if not venue_map:
        raise IngestionError("no check-in falls inside the region")
    users = np.array(sorted({u for u, _ in pairs}), dtype=np.int64)
    local = np.full(social.node_count, -1, dtype=np.int64)
    local[users] = np.arange(len(users))
    e = social.edges()
    keep = (local[e[:, 0]] >= 0) & (local[e[:, 1]] >= 0)
    target = build_graph(local[e[keep]], len(users))
    aux = build_graph([], len(venue_map))
    pair_arr = np.array(sorted(pairs), dtype=np.int64)
    bridge = build_bipartite(np.column_stack((local[pair_arr[:, 0]], pair_arr[:, 1])),
                             len(users), len(venue_map))
    venues = [GeoVenue(i, lat, lon) for i, (lat, lon) in enumerate(venue_pos)]
    net = TwoLayerNetwork(target, aux, bridge)
    return CheckinNetwork(net, venues, users, venue_map.external(), raw, len(pairs))


# -- bipartite pairs and venues ------------------------------------------------


def _int_pairs(path, what):
    out = []
    for no, fields in _data_lines(path):
        if len(fields) < 2:
            raise IngestionError(f"expected '{what}', got {' '.join(fields)!r}", path=path, line=no)
        try:
            a, b = int(fields[0]), int(fields[1])
        except ValueError:
            raise IngestionError(f"non-integer id in {' '.join(fields[:2])!r}", path=path, line=no) from None
        if a < 0 or b < 0:
            raise IngestionError("negative id", path=path, line=no)
        out.append((a, b))
    return np.array(out, dtype=np.int64).reshape(-1, 2)


def load_bipartite_pairs(path, u_count=None, v_count=None):
    """Bridge from ``u v`` lines of dense integer ids; duplicates collapse.

    Side sizes default to the header counts, else to the largest id plus one.
    """
    head = _header(path)
    pairs = _int_pairs(path, "u v")
    u_count = u_count if u_count is not None else head.get("u_count", int(pairs[:, 0].max(initial=-1)) + 1)
    v_count = v_count if v_count is not None else head.get("v_count", int(pairs[:, 1].max(initial=-1)) + 1)
    if len(pairs) and (pairs[:, 0].max() >= u_count or pairs[:, 1].max() >= v_count):
        raise IngestionError(f"pair id exceeds declared sizes {u_count}x{v_count}", path=path)
    return build_bipartite(pairs, u_count, v_count)


def load_pairs_mapped(path, u_map, v_map):
    """``u v`` lines of external ids, translated (and extended) through the maps.

    Returns the dense pair array; build the bridge once both maps are final.
    """
    out = []
    for no, fields in _data_lines(path):
        if len(fields) < 2:
            raise IngestionError("expected 'u v'", path=path, line=no)
        out.append((u_map.dense(fields[0]), v_map.dense(fields[1])))
    return np.array(out, dtype=np.int64).reshape(-1, 2)


def load_venues(path):
    """Venues from ``venue_id lat lon`` lines; ids remapped densely.

    Returns ``(venues, mapping)``.
    """
    mapping = IdMap()
    venues = []
    for no, fields in _data_lines(path):
        if len(fields) != 3:
            raise IngestionError("expected 'venue_id lat lon'", path=path, line=no)
        if fields[0] in mapping:
            raise IngestionError(f"venue {fields[0]!r} listed twice", path=path, line=no)
        try:
            lat, lon = float(fields[1]), float(fields[2])
            venues.append(GeoVenue(mapping.dense(fields[0]), lat, lon))
        except ValueError as exc:
            raise IngestionError(str(exc), path=path, line=no) from None
    return venues, mapping


def write_venues(venues, path, names=None):
    with open(path, "w") as fh:
        for v in venues:
            name = v.venue_id if names is None else names[v.venue_id]
            fh.write(f"{name} {v.lat!r} {v.lon!r}\n")


# -- network directories ----------------------------------------------------------


def write_edge_list(g, path):
    with open(path, "w") as fh:
        fh.write(f"# nodes {g.node_count} edges {g.edge_count}\n")
        for a, b in g.edges().tolist():
            fh.write(f"{a} {b}\n")


def read_dense_edge_list(path):
    """Edge list of dense integer ids whose header fixes the node count."""
    head = _header(path)
    pairs = _int_pairs(path, "src dst")
    n = head.get("nodes", int(pairs.max(initial=-1)) + 1)
    if len(pairs) and pairs.max() >= n:
        raise IngestionError(f"node id exceeds declared count {n}", path=path)
    return build_graph(pairs, n)


def write_bipartite(b, path):
    with open(path, "w") as fh:
        fh.write(f"# u_count {b.u_count} v_count {b.v_count} edges {b.edge_count}\n")
        for u, v in b.edges().tolist():
            fh.write(f"{u} {v}\n")


def save_network(net, directory, venues=None):
    """Write the three layer files (plus venues if given); returns their paths."""
    os.makedirs(directory, exist_ok=True)
    paths = [os.path.join(directory, name) for name in (TARGET_FILE, AUX_FILE, BRIDGE_FILE)]
    write_edge_list(net.target, paths[0])
    write_edge_list(net.auxiliary, paths[1])
    write_bipartite(net.bridge, paths[2])
    if venues is not None:
        paths.append(os.path.join(directory, VENUE_FILE))
        write_venues(venues, paths[-1])
    return paths


def load_network(directory):
    """Inverse of :func:`save_network`; returns ``(net, venues_or_None)``."""
    paths = [os.path.join(directory, name) for name in (TARGET_FILE, AUX_FILE, BRIDGE_FILE)]
    for p in paths:
        if not os.path.exists(p):
            raise IngestionError("missing network file", path=p)
    target = read_dense_edge_list(paths[0])
    aux = read_dense_edge_list(paths[1])
    bridge = load_bipartite_pairs(paths[2], target.node_count, aux.node_count)
    venue_path = os.path.join(directory, VENUE_FILE)
    venues = None
    if os.path.exists(venue_path):
        loaded, mapping = load_venues(venue_path)
        venues = [GeoVenue(int(name), v.lat, v.lon) for name, v in zip(mapping.external(), loaded)]
    return TwoLayerNetwork(target, aux, bridge), venues
