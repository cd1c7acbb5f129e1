"""Time the compiled kernels against the pure-Python fallback.

Both backends consume the same random stream, so every row also checks that
their outputs are identical.

    python benchmarks/bench_kernels.py --steps 200000
"""

import argparse
import time

import numpy as np

from twolayer import _kernels
from twolayer.generators import PRESETS, generate_two_layer
from twolayer.rng import make_rng
from twolayer.vertex_samplers import UniformSampler
from twolayer.walkers import _jump_cdf, _lookup_table, rwtvsa_weights
from twolayer.weights import compute_rwtrwa_weights, default_desired_weights


def _time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _same(a, b):
    if isinstance(a, tuple):
        return all(np.array_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def cases(net, steps, ba_nodes):
    g, aux, b = net.target, net.auxiliary, net.bridge
    a = _lookup_table(UniformSampler(b.v_count), b.v_count)
    w = rwtvsa_weights(net, 10.0, a)
    cdf, last = _jump_cdf(net, a)
    rw = compute_rwtrwa_weights(net, 10.0, 10.0, default_desired_weights(net, 10.0))
    return {
        "walk_indirect": lambda k: k.walk_indirect(
            g.indptr, g.indices, w, cdf, last, b.v_indptr, b.v_indices, 0, steps, False, make_rng(1)),
        "vsa1_draws": lambda k: k.vsa1_draws(cdf, last, b.v_indptr, b.v_indices, steps, make_rng(1)),
        "walk_rwtrwa": lambda k: k.walk_rwtrwa(
            g.indptr, g.indices, aux.indptr, aux.indices, b.u_indptr, b.u_indices,
            b.v_indptr, b.v_indices, rw.desired_wU, rw.wV, rw.proposal_wU,
            0, int(b.u_neighbors(0)[0]), 0, steps, make_rng(1)),
        "ba_edges": lambda k: k.ba_edges(ba_nodes, 5, make_rng(1)),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=100_000, help="walk length / draw count")
    parser.add_argument("--ba-nodes", type=int, default=20_000, help="nodes for the BA generator")
    parser.add_argument("--repeat", type=int, default=3, help="best-of repetitions")
    args = parser.parse_args()

    python = _kernels.get_backend("python")
    try:
        compiled = _kernels.get_backend("cython")
    except ImportError:
        raise SystemExit("compiled kernels are not built; run 'pip install -e . --no-build-isolation'") from None
    net = generate_two_layer(PRESETS["barbell-small"])
    print(f"{'kernel':<14} {'cython s':>10} {'python s':>10} {'speedup':>9}  identical")
    for name, call in cases(net, args.steps, args.ba_nodes).items():
        tc, oc = _time(lambda: call(compiled), args.repeat)
        tp, op = _time(lambda: call(python), 1)
        print(f"{name:<14} {tc:>10.4f} {tp:>10.4f} {tp / tc:>8.1f}x  {_same(oc, op)}")


if __name__ == "__main__":
    main()
