"""Characteristic functions, ratio estimators and exact ground truth.

Every estimator here has the form

    theta_hat = sum_s f(s) / denom(s)  /  sum_s 1 / denom(s)

and differs only in where ``denom`` comes from: ``d + w`` for the walks,
``b_u`` for VS-A-I, ``a_v * d_u^(b)`` for VS-A-II. Sums are compensated
(``math.fsum``).
"""

import csv
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import EstimationError, ParameterError
from .walkers import SamplePath, _lookup_table

KINDS = ("degree-pdf", "degree-ccdf", "custom")


@dataclass(frozen=True)
class CharacteristicFn:
    """``f: U -> R``. Degree kinds are ``1{d_u = d}`` and ``1{d_u > d}``."""

    kind: str
    d: int = 0
    values: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown characteristic kind {self.kind!r}")

    def evaluate(self, g, nodes=None):
        """``f`` at ``nodes`` (all nodes when ``None``) of target graph ``g``."""
        if self.kind == "custom":
            vals = np.asarray(self.values, dtype=float)
            if len(vals) != g.node_count:
                raise ParameterError("tabulated f must have one value per target node")
            return vals if nodes is None else vals[nodes]
        deg = g.degrees if nodes is None else g.degrees[nodes]
        if self.kind == "degree-pdf":
            return (deg == self.d).astype(float)
        return (deg > self.d).astype(float)


def degree_pdf(d):
    return CharacteristicFn("degree-pdf", int(d))


def degree_ccdf(d):
    return CharacteristicFn("degree-ccdf", int(d))


def tabulated(values):
    return CharacteristicFn("custom", values=tuple(float(x) for x in values))


def ground_truth(g, f):
    """``theta = (1/n) sum_u f(u)``."""
    if g.node_count == 0:
        raise ParameterError("empty graph")
    return math.fsum(f.evaluate(g).tolist()) / g.node_count


def ground_truth_curve(g, kind="ccdf", d_max=None):
    """Exact degree PDF or CCDF over ``d = 0..d_max`` (true maximum by default)."""
    d_max = int(g.degrees.max(initial=0)) if d_max is None else int(d_max)
    pdf = np.bincount(g.degrees, minlength=d_max + 1)[:d_max + 1] / g.node_count
    if kind == "pdf":
        return pdf
    if kind == "ccdf":
        return np.count_nonzero(g.degrees[:, None] > np.arange(d_max + 1)[None, :], axis=0) / g.node_count
    raise ParameterError(f"unknown curve kind {kind!r}")


def _ratio(f_values, weights):
    if len(weights) == 0:
        raise EstimationError("no samples")
    z = math.fsum(weights)
    if not z > 0:
        raise EstimationError("normalizer is not positive")
    return math.fsum(f * w for f, w in zip(f_values, weights)) / z, z


def estimate_ratio(samples):
    """Ratio estimate from ``(f_value, denom)`` pairs."""
    samples = list(samples)
    if not samples:
        raise EstimationError("no samples")
    if any(not d > 0 for _, d in samples):
        raise EstimationError("denominators must be positive")
    theta, _ = _ratio([float(f) for f, _ in samples], [1.0 / d for _, d in samples])
    return theta


def estimate_path(path, g, f):
    """Ratio estimate of ``f`` from a :class:`SamplePath` on target graph ``g``."""
    return estimate_ratio(zip(f.evaluate(g, path.nodes).tolist(), path.denom.tolist()))


def vsa1_path(samples, net, weight_lookup):
    """Wrap VS-A-I target samples as a path with denominators ``b_u``."""
    samples = np.asarray(samples, dtype=np.int64)
    b = net.bridge
    a = _lookup_table(weight_lookup, b.v_count)
    for u in np.unique(samples).tolist():
        nb = b.u_neighbors(u)
        if not len(nb):
            raise EstimationError(f"sampled node u={u} has no bridge neighbor")
        missing = nb[np.isnan(a[nb])]
        if len(missing):
            raise EstimationError(f"weight a_v unknown for v={int(missing[0])} (neighbor of u={u})")
    e = b.edges()
    b_u = np.bincount(e[:, 0], weights=a[e[:, 1]] / b.v_degrees[e[:, 1]], minlength=b.u_count)
    return SamplePath(samples, b_u[samples], np.zeros(len(samples), dtype=bool))


def estimate_vsa1(samples, net, weight_lookup, f):
    """VS-A-I estimate: samples reweighted by ``1 / b_u``."""
    if len(samples) == 0:
        raise EstimationError("no samples")
    return estimate_path(vsa1_path(samples, net, weight_lookup), net.target, f)


def estimate_vsa2(groups, f, g=None):
    """VS-A-II estimate from sample groups.

    ``sum_v (1/a_v) sum_{u in U_v} f(u)/d_u^(b)`` over the same sum with
    ``f = 1``. ``f`` is a :class:`CharacteristicFn` (needs target graph ``g``)
    or a plain callable on node ids.
    """
    if not groups:
        raise EstimationError("no groups")
    num, den = [], []
    for grp in groups:
        if np.any(grp.d_u_b < 1):
            raise EstimationError(f"group v={grp.v} has a member without bridge edges")
        if isinstance(f, CharacteristicFn):
            fv = f.evaluate(g, grp.members)
        else:
            fv = np.array([f(int(u)) for u in grp.members], dtype=float)
        inner = 1.0 / grp.d_u_b
        num.append(math.fsum((fv * inner).tolist()) / grp.a_v)
        den.append(math.fsum(inner.tolist()) / grp.a_v)
    z = math.fsum(den)
    return math.fsum(num) / z


@dataclass
class EstimateReport:
    theta_hat: object
    Z: float
    budget: int
    method: str
    seed: object = None
    kind: str = "scalar"
    alpha: float = 0.0
    beta: float = 0.0
    truth: object = None

    def __post_init__(self):
        if isinstance(self.theta_hat, np.ndarray) and self.kind in ("pdf", "ccdf"):
            if np.any(self.theta_hat < -1e-12) or np.any(self.theta_hat > 1 + 1e-12):
                raise EstimationError("degree curve outside [0, 1]")

    def to_dict(self):
        out = asdict(self)
        for key in ("theta_hat", "truth"):
            if isinstance(out[key], np.ndarray):
                out[key] = out[key].tolist()
        return out

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def to_csv(self, path):
        curve = np.atleast_1d(self.theta_hat)
        truth = None if self.truth is None else np.atleast_1d(self.truth)
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["d", "estimate", "truth"])
            for d, est in enumerate(curve.tolist()):
                t = "" if truth is None or d >= len(truth) else repr(float(truth[d]))
                out.writerow([d, repr(est), t])


def _curve_from_weights(degrees, weights, d_max):
    """PDF and CCDF on ``0..d_max`` in one pass with a shared normalizer."""
    z = math.fsum(weights.tolist())
    if not z > 0:
        raise EstimationError("normalizer is not positive")
    pdf = np.zeros(d_max + 1)
    order = np.argsort(degrees, kind="stable")
    deg_sorted, w_sorted = degrees[order], weights[order]
    uniq, starts = np.unique(deg_sorted, return_index=True)
    ends = np.append(starts[1:], len(deg_sorted))
    for d, lo, hi in zip(uniq.tolist(), starts.tolist(), ends.tolist()):
        if d <= d_max:
            pdf[d] = math.fsum(w_sorted[lo:hi].tolist()) / z
    # ccdf(d) = sum of pdf above d; mass above d_max is included
    above = math.fsum(w_sorted[deg_sorted > d_max].tolist()) / z
    tail = np.cumsum(pdf[::-1])[::-1]
    ccdf = np.append(tail[1:], 0.0) + above
    return pdf, ccdf, z


def estimate_degree_distribution(samples, g, kind="ccdf", d_max=None, method="", **meta):
    """Degree PDF/CCDF curve estimated from a path or VS-A-II groups.

    ``samples`` is a :class:`SamplePath` (any walk, or VS-A-I via
    :func:`vsa1_path`) or a list of VS-A-II groups. ``d_max`` defaults to the
    largest sampled degree.
    """
    if isinstance(samples, SamplePath):
        path = samples
    else:
        from .walkers import groups_to_path
        path = groups_to_path(samples)
    if len(path) == 0:
        raise EstimationError("no samples")
    degrees = g.degrees[path.nodes]
    d_max = int(degrees.max()) if d_max is None else int(d_max)
    pdf, ccdf, z = _curve_from_weights(degrees, path.weights, d_max)
    curve = pdf if kind == "pdf" else ccdf
    if kind not in ("pdf", "ccdf"):
        raise ParameterError(f"unknown curve kind {kind!r}")
    return EstimateReport(curve, z, len(path), method, kind=kind, **meta)
