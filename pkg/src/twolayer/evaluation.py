"""Multi-trial experiment runner and NRMSE tables.

Trial ``i`` of a configuration runs on its own generator seeded with
``base_seed ^ i``, so a table depends only on the configuration and never on
worker count or scheduling.
"""

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import walkers
from .errors import EstimationError, ParameterError, TwoLayerError
from .estimators import CharacteristicFn, _curve_from_weights, ground_truth, ground_truth_curve, vsa1_path
from .rng import make_rng, trial_seed
from .vertex_samplers import UniformSampler

METHODS = ("RW", "RWwJ", "VSA-I", "VSA-II", "RWT-VSA", "RWT-RWA")

_ALIASES = {m.lower(): m for m in METHODS}


def canonical_method(name):
    """Accept ``rwt-vsa``, ``RWT_VSA`` and similar spellings."""
    key = str(name).strip().lower().replace("_", "-")
    if key not in _ALIASES:
        raise ParameterError(f"unknown method {name!r}; choose from {', '.join(METHODS)}")
    return _ALIASES[key]


@dataclass(frozen=True)
class TrialConfig:
    method: str
    alpha: float = 0.0
    beta: float = 0.0
    budget_fraction: float = 0.01
    runs: int = 1
    base_seed: int = 0
    burnin: int = 0
    start_nodes: tuple = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "method", canonical_method(self.method))
        if self.runs < 1:
            raise ParameterError("runs must be >= 1")
        if not 0 < self.budget_fraction <= 1:
            raise ParameterError("budget_fraction must lie in (0, 1]")
        if self.alpha < 0 or self.beta < 0:
            raise ParameterError("alpha and beta must be >= 0")
        if self.burnin < 0:
            raise ParameterError("burnin must be >= 0")
        if self.start_nodes is not None:
            object.__setattr__(self, "start_nodes", tuple(int(u) for u in self.start_nodes))
            if not self.start_nodes:
                raise ParameterError("start_nodes must not be empty")

    def budget(self, n):
        return max(1, int(round(self.budget_fraction * n)))

    def to_dict(self):
        out = asdict(self)
        out["start_nodes"] = None if self.start_nodes is None else list(self.start_nodes)
        return out


def nrmse(estimates, truth):
    """``sqrt(mean((est - truth)^2)) / truth``."""
    est = np.asarray(estimates, dtype=float)
    if est.size == 0:
        raise ParameterError("no estimates")
    if not truth > 0:
        raise ParameterError("NRMSE is undefined for zero truth")
    return math.sqrt(math.fsum(((est - truth) ** 2).tolist()) / est.size) / truth


def mean_relative_error(estimates, truth):
    """``|mean(est) - truth| / truth``: bias of the averaged estimate."""
    est = np.asarray(estimates, dtype=float)
    return abs(math.fsum(est.tolist()) / est.size - truth) / truth


# -- one trial ------------------------------------------------------------------


def _draw_start(net, config, rng):
    if config.start_nodes is None:
        return None
    return config.start_nodes[int(rng.random() * len(config.start_nodes))]


def sample_once(net, config, rng, sampler=None):
    """One trial's sample path for ``config.method`` (burn-in removed)."""
    return _sample(net, config, rng, sampler)[0]


def _sample(net, config, rng, sampler):
    """``(path, start)``; ``start`` is the walk's first node, -1 for independent sampling."""
    g = net.target
    budget = config.budget(g.node_count)
    total = budget + config.burnin
    method = config.method
    sampler = sampler if sampler is not None else UniformSampler(net.bridge.v_count)
    start = _draw_start(net, config, rng)
    if method == "RW":
        if start is None:
            start = walkers._resolve_start(None, g.degrees > 0, rng, "RW")
        path = walkers.simple_rw(g, start, total, rng)
    elif method == "RWwJ":
        path = walkers.rwwj(g, config.alpha, total, rng, start=start)
    elif method == "RWT-VSA":
        path = walkers.rwt_vsa_walk(net, config.alpha, sampler, start, total, rng)
    elif method == "RWT-RWA":
        run = walkers.rwt_rwa_walk(net, config.alpha, config.beta, None, (start, None, None), total, rng)
        path = run.path
    elif method == "VSA-I":
        return vsa1_path(walkers.vsa1_sample(net, sampler, budget, rng), net, sampler), -1
    else:
        return walkers.groups_to_path(walkers.vsa2_sample(net, sampler, budget, rng)), -1
    start = int(path.nodes[0])
    if config.burnin:
        path = walkers.SamplePath(path.nodes[config.burnin:], path.denom[config.burnin:],
                                  path.jumped[config.burnin:])
    return path, start


def _trial_estimate(net, config, target, d_max, index, sampler):
    rng = make_rng(trial_seed(config.base_seed, index))
    path, start = _sample(net, config, rng, sampler)
    g = net.target
    if isinstance(target, CharacteristicFn):
        f = target.evaluate(g, path.nodes)
        w = path.weights
        return np.array([math.fsum((f * w).tolist()) / math.fsum(w.tolist())]), start
    pdf, ccdf, _ = _curve_from_weights(g.degrees[path.nodes], path.weights, d_max)
    return (pdf if target == "pdf" else ccdf), start


# worker-process globals so the network is shipped once per worker
_WORKER = {}


def _init_worker(net, config, target, d_max, sampler):
    _WORKER.update(net=net, config=config, target=target, d_max=d_max, sampler=sampler)


def _worker_chunk(indices):
    w = _WORKER
    return [_trial_estimate(w["net"], w["config"], w["target"], w["d_max"], i, w["sampler"])
            for i in indices]


# -- many trials ----------------------------------------------------------------


@dataclass
class NrmseTable:
    """NRMSE per degree bin (or one scalar row) with the raw trial estimates."""

    degrees: np.ndarray
    truth: np.ndarray
    nrmse: np.ndarray
    estimates: np.ndarray
    config: TrialConfig
    budget: int
    kind: str
    starts: np.ndarray = None

    def rows(self):
        c = self.config
        for d, t, e in zip(self.degrees.tolist(), self.truth.tolist(), self.nrmse.tolist()):
            yield [d, repr(t), repr(e), c.method, repr(float(c.alpha)), repr(float(c.beta)),
                   self.budget, c.runs]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["degree", "truth", "nrmse", "method", "alpha", "beta", "budget", "runs"])
            out.writerows(self.rows())

    def to_json(self, path):
        starts = None if self.starts is None else self.starts.tolist()
        doc = {"kind": self.kind, "budget": self.budget, "config": self.config.to_dict(), "starts": starts,
               "rows": [{"degree": d, "truth": t, "nrmse": e}
                        for d, t, e in zip(self.degrees.tolist(), self.truth.tolist(),
                                           self.nrmse.tolist())]}
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def decile(self, which):
        """Mean NRMSE over the lowest or highest 10% of reported degree bins."""
        k = max(1, math.ceil(0.1 * len(self.degrees)))
        sel = self.nrmse[:k] if which == "low" else self.nrmse[-k:]
        return float(np.mean(sel))


def run_estimates(net, config, target="ccdf", workers=1, sampler=None):
    """Raw per-trial estimates, shape ``(runs, bins)``, plus the degree range used.

    ``target`` is ``"pdf"``, ``"ccdf"`` or a :class:`CharacteristicFn`.
    """
    est, d_max, _ = _run(net, config, target, workers, sampler)
    return est, d_max


def _run(net, config, target, workers, sampler):
    if target not in ("pdf", "ccdf") and not isinstance(target, CharacteristicFn):
        raise ParameterError(f"unknown estimation target {target!r}")
    d_max = int(net.target.degrees.max(initial=0))
    workers = max(1, int(workers or 1))
    indices = list(range(config.runs))
    try:
        if workers == 1 or config.runs == 1:
            rows = [_trial_estimate(net, config, target, d_max, i, sampler) for i in indices]
        else:
            chunks = [indices[k::workers] for k in range(workers)]
            with ProcessPoolExecutor(workers, initializer=_init_worker,
                                     initargs=(net, config, target, d_max, sampler)) as pool:
                parts = list(pool.map(_worker_chunk, chunks))
            rows = [None] * config.runs
            for chunk, part in zip(chunks, parts):
                for i, r in zip(chunk, part):
                    rows[i] = r
    except TwoLayerError as exc:
        raise type(exc)(f"{config.method} trials aborted: {exc}") from exc
    est = np.vstack([r[0] for r in rows])
    return est, d_max, np.array([r[1] for r in rows], dtype=np.int64)


def run_trials(net, config, target="ccdf", workers=1, sampler=None):
    """NRMSE table over ``config.runs`` independent trials.

    Degree bins whose true mass is zero are left out. Each trial draws a
    fresh start; the starts are kept on the table (-1 for independent sampling).
    """
    est, d_max, starts = _run(net, config, target, workers, sampler)
    g = net.target
    if isinstance(target, CharacteristicFn):
        truth = np.array([ground_truth(g, target)])
        degrees = np.array([target.d])
        kind = target.kind
    else:
        truth = ground_truth_curve(g, target, d_max)
        degrees = np.arange(d_max + 1)
        kind = target
    keep = truth > 0
    if not keep.any():
        raise EstimationError("ground truth is zero everywhere")
    est = est[:, keep]
    truth = truth[keep]
    err = np.array([nrmse(est[:, j], truth[j]) for j in range(len(truth))])
    return NrmseTable(degrees[keep], truth, err, est, config, config.budget(g.node_count), kind, starts)


def default_workers():
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)
